"""Discrete hidden Markov models trained by constrained particle swarm
optimization, with a Baum-Welch baseline."""

from ._core import (
    ConstraintViolationError,
    Dataset,
    DegenerateInputError,
    ExperimentReport,
    HmmModel,
    ObservationSequence,
    ParseError,
    PsoResult,
    SwarmConfig,
    Topology,
    baum_welch_step,
    baum_welch_train,
    brute_force_log_likelihood,
    decode,
    encode,
    forward_log_likelihood,
    generate_datasets,
    pso_train,
    random_model,
    remap_value,
    renormalize,
    run_comparison,
    sample_sequence,
    viterbi_decode,
)

__all__ = [
    "ConstraintViolationError",
    "Dataset",
    "DegenerateInputError",
    "ExperimentReport",
    "HmmModel",
    "ObservationSequence",
    "ParseError",
    "PsoResult",
    "SwarmConfig",
    "Topology",
    "baum_welch_step",
    "baum_welch_train",
    "brute_force_log_likelihood",
    "decode",
    "encode",
    "forward_log_likelihood",
    "generate_datasets",
    "pso_train",
    "random_model",
    "remap_value",
    "renormalize",
    "run_comparison",
    "sample_sequence",
    "viterbi_decode",
]
