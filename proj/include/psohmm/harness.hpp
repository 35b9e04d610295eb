#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psohmm/hmm.hpp"
#include "psohmm/pso.hpp"

namespace psohmm {

enum class Group { one_dim, two_dim };

std::string to_string(Group group);
Group group_from_string(const std::string& name);
inline std::size_t dims_of(Group group) { return group == Group::one_dim ? 1 : 2; }

struct DatasetSpec {
  Group group = Group::one_dim;
  std::size_t sequence_count = 5;
  std::size_t length = 100;
  std::size_t m = 5;
  std::size_t n_hidden = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Dataset {
  std::size_t index = 0;
  Group group = Group::one_dim;
  ObservationSequence sequence;
  HmmModel ground_truth;  // diagnostics only; trainers never see it
};

/// Each sequence comes from its own random ground-truth model, drawn from
/// stream `index` of spec.seed.
std::vector<Dataset> generate_datasets(const DatasetSpec& spec);

/// seq_<i>.txt and truth_<i>.json for every dataset.
void write_datasets(const std::vector<Dataset>& datasets, const DatasetSpec& spec,
                    const std::filesystem::path& dir);
/// Reads seq_<i>.txt (and truth_<i>.json when present) for i = 0, 1, ...
std::vector<Dataset> load_datasets(const std::filesystem::path& dir);

enum class Method { pso, baum_welch };
std::string to_string(Method method);

struct ComparisonRow {
  std::size_t dataset = 0;
  Group group = Group::one_dim;
  Method method = Method::pso;
  std::uint64_t seed = 0;
  double initial_loglik = kNegInf;
  double final_loglik = kNegInf;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;  // forward passes spent
  double wall_seconds = 0.0;
  std::string error;            // empty on success

  bool ok() const { return error.empty(); }
};

struct RunTrace {
  std::size_t dataset = 0;
  std::uint64_t seed = 0;
  FitnessTrace pso;
  std::vector<double> bw;

  std::string run_id() const;
};

struct ExperimentReport {
  std::vector<ComparisonRow> rows;
  std::vector<RunTrace> traces;
  nlohmann::json config = nlohmann::json::object();
};

struct ComparisonSettings {
  SwarmConfig pso;              // pso.seed is overridden per run
  std::size_t bw_iterations = 50;
  std::vector<std::uint64_t> seeds;
  std::size_t n_hidden = 2;
  unsigned threads = 1;

  nlohmann::json to_json() const;
};

/// Trains one PSO and one Baum-Welch model per (dataset, seed). Failing runs
/// become error rows. Rows are ordered by dataset, then seed, PSO first.
ExperimentReport run_comparison(const std::vector<Dataset>& datasets,
                                const ComparisonSettings& settings);

struct EmitOptions {
  /// Also write timing.csv (wall-clock, not reproducible byte-for-byte).
  bool include_timing = false;
};

/// comparison.csv, pso_trace_<run>.csv, convergence_<run>.csv, report.json.
/// Returns the written paths in write order.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const std::filesystem::path& out_dir,
                                               const EmitOptions& options = {});

nlohmann::json report_to_json(const ExperimentReport& report);

struct DatasetSummary {
  std::size_t dataset = 0;
  std::size_t pairs = 0;     // (seed) pairs where both runs succeeded
  std::size_t pso_wins = 0;  // pairs with pso final >= bw final
  double pso_mean = 0.0;
  double bw_mean = 0.0;
};

struct ComparisonSummary {
  std::vector<DatasetSummary> datasets;
  std::size_t pairs = 0;
  std::size_t pso_wins = 0;
  std::size_t error_rows = 0;

  double win_fraction() const {
    return pairs == 0 ? 0.0 : static_cast<double>(pso_wins) / static_cast<double>(pairs);
  }
  std::size_t datasets_pso_mean_ahead() const;
};

ComparisonSummary summarize(const ExperimentReport& report);

}  // namespace psohmm
