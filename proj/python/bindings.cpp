#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "psohmm/harness.hpp"
#include "psohmm/hmm.hpp"
#include "psohmm/io.hpp"
#include "psohmm/pso.hpp"

namespace py = pybind11;
using namespace psohmm;

namespace {

using Matrix = std::vector<std::vector<double>>;

HmmModel make_model(const std::vector<double>& pi, const Matrix& trans,
                    const std::vector<Matrix>& emit) {
  const std::size_t n = pi.size();
  if (n == 0 || trans.size() != n || emit.empty()) throw std::invalid_argument("inconsistent model shape");
  const std::size_t m = emit.front().empty() ? 0 : emit.front().front().size();
  HmmModel model(n, m, emit.size());
  model.pi = pi;
  for (std::size_t i = 0; i < n; ++i) {
    if (trans[i].size() != n) throw std::invalid_argument("trans must be n x n");
    for (std::size_t j = 0; j < n; ++j) model.a(i, j) = trans[i][j];
  }
  for (std::size_t r = 0; r < emit.size(); ++r) {
    if (emit[r].size() != n) throw std::invalid_argument("each emit matrix needs n rows");
    for (std::size_t i = 0; i < n; ++i) {
      if (emit[r][i].size() != m) throw std::invalid_argument("emit rows must all have m entries");
      for (std::size_t k = 0; k < m; ++k) model.b(r, i, k) = emit[r][i][k];
    }
  }
  return model;
}

Matrix trans_matrix(const HmmModel& model) {
  Matrix out(model.n);
  for (std::size_t i = 0; i < model.n; ++i) {
    auto row = model.trans_row(i);
    out[i].assign(row.begin(), row.end());
  }
  return out;
}

std::vector<Matrix> emit_matrices(const HmmModel& model) {
  std::vector<Matrix> out(model.d, Matrix(model.n));
  for (std::size_t r = 0; r < model.d; ++r) {
    for (std::size_t i = 0; i < model.n; ++i) {
      auto row = model.emit_row(r, i);
      out[r][i].assign(row.begin(), row.end());
    }
  }
  return out;
}

ObservationSequence make_sequence(const std::vector<std::vector<std::uint32_t>>& steps) {
  if (steps.empty()) throw std::invalid_argument("sequence needs at least one step");
  std::vector<std::uint32_t> flat;
  for (const auto& s : steps) {
    if (s.size() != steps.front().size()) throw std::invalid_argument("ragged observation steps");
    flat.insert(flat.end(), s.begin(), s.end());
  }
  return ObservationSequence(steps.front().size(), std::move(flat));
}

std::vector<std::vector<std::uint32_t>> sequence_steps(const ObservationSequence& seq) {
  std::vector<std::vector<std::uint32_t>> out(seq.length());
  for (std::size_t t = 0; t < seq.length(); ++t) {
    auto step = seq.step(t);
    out[t].assign(step.begin(), step.end());
  }
  return out;
}

py::object json_to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discrete HMMs trained by constrained particle swarm optimization or Baum-Welch";

  py::register_exception<ConstraintViolationError>(m, "ConstraintViolationError", PyExc_ValueError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<HmmModel>(m, "HmmModel")
      .def(py::init(&make_model), py::arg("pi"), py::arg("trans"), py::arg("emit"))
      .def_readonly("n", &HmmModel::n)
      .def_readonly("m", &HmmModel::m)
      .def_readonly("d", &HmmModel::d)
      .def_property_readonly("pi", [](const HmmModel& model) { return model.pi; })
      .def_property_readonly("trans", &trans_matrix)
      .def_property_readonly("emit", &emit_matrices)
      .def("validate",
           [](const HmmModel& model) {
             py::list out;
             for (const auto& v : validate_model(model)) {
               out.append(py::dict(py::arg("where") = v.where, py::arg("what") = v.what,
                                   py::arg("deviation") = v.deviation));
             }
             return out;
           })
      .def("to_json", &serialize_model)
      .def_static("from_json", &parse_model)
      .def_static("uniform", &HmmModel::uniform, py::arg("n"), py::arg("m"), py::arg("d") = 1)
      .def(py::self == py::self)
      .def("__repr__", [](const HmmModel& model) {
        return "HmmModel(n=" + std::to_string(model.n) + ", m=" + std::to_string(model.m) +
               ", d=" + std::to_string(model.d) + ")";
      });

  py::class_<ObservationSequence>(m, "ObservationSequence")
      .def(py::init(&make_sequence), py::arg("steps"))
      .def_static("from_symbols", &ObservationSequence::from_symbols, py::arg("symbols"))
      .def_property_readonly("steps", &sequence_steps)
      .def_property_readonly("dims", &ObservationSequence::dims)
      .def("__len__", &ObservationSequence::length)
      .def(py::self == py::self);

  m.def(
      "random_model",
      [](std::size_t n, std::size_t m_, std::size_t d, std::uint64_t seed) {
        Rng rng(seed);
        return random_model(n, m_, d, rng);
      },
      py::arg("n"), py::arg("m"), py::arg("d") = 1, py::arg("seed") = 0);
  m.def(
      "sample_sequence",
      [](const HmmModel& model, std::size_t length, std::uint64_t seed) {
        Rng rng(seed);
        return sample_sequence(model, length, rng);
      },
      py::arg("model"), py::arg("length"), py::arg("seed") = 0);
  m.def("forward_log_likelihood", &forward_log_likelihood, py::arg("model"), py::arg("obs"));
  m.def("brute_force_log_likelihood", &brute_force_log_likelihood, py::arg("model"),
        py::arg("obs"));
  m.def(
      "viterbi_decode",
      [](const HmmModel& model, const ObservationSequence& obs) {
        auto res = viterbi_decode(model, obs);
        return py::make_tuple(res.path, res.log_probability);
      },
      py::arg("model"), py::arg("obs"));
  m.def("baum_welch_step", &baum_welch_step, py::arg("model"), py::arg("obs"));
  m.def(
      "baum_welch_train",
      [](const HmmModel& model, const ObservationSequence& obs, std::size_t iterations) {
        auto res = baum_welch_train(model, obs, iterations);
        return py::make_tuple(res.model, res.trace);
      },
      py::arg("model"), py::arg("obs"), py::arg("iterations") = 50);

  py::enum_<Topology>(m, "Topology")
      .value("GLOBAL_BEST", Topology::global_best)
      .value("RING", Topology::ring);

  py::class_<SwarmConfig>(m, "SwarmConfig")
      .def(py::init<>())
      .def_readwrite("particle_count", &SwarmConfig::particle_count)
      .def_readwrite("iterations", &SwarmConfig::iterations)
      .def_readwrite("omega", &SwarmConfig::omega)
      .def_readwrite("c1", &SwarmConfig::c1)
      .def_readwrite("c2", &SwarmConfig::c2)
      .def_readwrite("topology", &SwarmConfig::topology)
      .def_readwrite("neighborhood_k", &SwarmConfig::neighborhood_k)
      .def_readwrite("seed", &SwarmConfig::seed)
      .def("validate", &SwarmConfig::validate);

  py::class_<PsoResult>(m, "PsoResult")
      .def_readonly("model", &PsoResult::model)
      .def_readonly("gbest_fitness", &PsoResult::gbest_fitness)
      .def_readonly("evaluations", &PsoResult::evaluations)
      .def_property_readonly("gbest_trace", [](const PsoResult& r) { return r.trace.gbest; })
      .def_property_readonly("pbest_gap_trace",
                             [](const PsoResult& r) { return r.trace.mean_pbest_gap; })
      .def_property_readonly("gbest_position",
                             [](const PsoResult& r) { return r.gbest_position.values; });

  m.def(
      "pso_train",
      [](const ObservationSequence& obs, std::size_t n, std::size_t m_, const SwarmConfig& cfg) {
        return pso_train(obs, n, m_, obs.dims(), cfg);
      },
      py::arg("obs"), py::arg("n"), py::arg("m"), py::arg("config") = SwarmConfig{});

  m.def(
      "encode", [](const HmmModel& model) { return encode(model).values; }, py::arg("model"));
  m.def(
      "decode",
      [](std::vector<double> values, std::size_t n, std::size_t m_, std::size_t d) {
        return decode(Position{std::move(values)}, n, m_, d);
      },
      py::arg("position"), py::arg("n"), py::arg("m"), py::arg("d") = 1);
  m.def("remap_value", &remap_value, py::arg("psi"), py::arg("xi"));
  m.def(
      "renormalize",
      [](std::vector<double> values, std::size_t n, std::size_t m_, std::size_t d) {
        return renormalize(Position{std::move(values)}, ParameterLayout{n, m_, d}).values;
      },
      py::arg("position"), py::arg("n"), py::arg("m"), py::arg("d") = 1);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("index", &Dataset::index)
      .def_readonly("sequence", &Dataset::sequence)
      .def_readonly("ground_truth", &Dataset::ground_truth);

  m.def(
      "generate_datasets",
      [](const std::string& group, std::size_t count, std::size_t length, std::size_t m_,
         std::size_t n, std::uint64_t seed) {
        return generate_datasets({group_from_string(group), count, length, m_, n, seed});
      },
      py::arg("group") = "1dim", py::arg("count") = 5, py::arg("length") = 100, py::arg("m") = 5,
      py::arg("n") = 2, py::arg("seed") = 0);

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_property_readonly("row_count", [](const ExperimentReport& r) { return r.rows.size(); })
      .def("to_dict", [](const ExperimentReport& r) { return json_to_python(report_to_json(r)); })
      .def(
          "emit",
          [](const ExperimentReport& r, const std::filesystem::path& out_dir) {
            return emit_report(r, out_dir);
          },
          py::arg("out_dir"))
      .def("summary", [](const ExperimentReport& r) {
        const auto s = summarize(r);
        py::list datasets;
        for (const auto& d : s.datasets) {
          datasets.append(py::dict(py::arg("dataset") = d.dataset, py::arg("pairs") = d.pairs,
                                   py::arg("pso_wins") = d.pso_wins,
                                   py::arg("pso_mean") = d.pso_mean,
                                   py::arg("bw_mean") = d.bw_mean));
        }
        return py::dict(py::arg("pairs") = s.pairs, py::arg("pso_wins") = s.pso_wins,
                        py::arg("error_rows") = s.error_rows, py::arg("datasets") = datasets);
      });

  m.def(
      "run_comparison",
      [](const std::vector<Dataset>& datasets, const SwarmConfig& cfg, std::size_t bw_iterations,
         std::vector<std::uint64_t> seeds, std::size_t n, unsigned threads) {
        ComparisonSettings settings;
        settings.pso = cfg;
        settings.bw_iterations = bw_iterations;
        settings.seeds = std::move(seeds);
        settings.n_hidden = n;
        settings.threads = threads;
        py::gil_scoped_release release;
        return run_comparison(datasets, settings);
      },
      py::arg("datasets"), py::arg("config") = SwarmConfig{}, py::arg("bw_iterations") = 50,
      py::arg("seeds") = std::vector<std::uint64_t>{0}, py::arg("n") = 2, py::arg("threads") = 1);
}
