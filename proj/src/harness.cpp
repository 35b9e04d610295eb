#include "psohmm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "psohmm/io.hpp"

namespace psohmm {

std::string to_string(Group group) { return group == Group::one_dim ? "1dim" : "2dim"; }

Group group_from_string(const std::string& name) {
  if (name == "1dim" || name == "1") return Group::one_dim;
  if (name == "2dim" || name == "2") return Group::two_dim;
  throw std::invalid_argument("group: expected '1dim' or '2dim', got '" + name + "'");
}

std::string to_string(Method method) { return method == Method::pso ? "PSOHMM" : "BWHMM"; }

void DatasetSpec::validate() const {
  if (sequence_count == 0) throw std::invalid_argument("count: must be at least 1");
  if (length == 0) throw std::invalid_argument("t: must be at least 1");
  if (m == 0) throw std::invalid_argument("m: must be at least 1");
  if (n_hidden == 0) throw std::invalid_argument("n: must be at least 1");
}

std::vector<Dataset> generate_datasets(const DatasetSpec& spec) {
  spec.validate();
  std::vector<Dataset> out;
  out.reserve(spec.sequence_count);
  for (std::size_t i = 0; i < spec.sequence_count; ++i) {
    Rng rng = Rng::derived(spec.seed, i);
    Dataset ds;
    ds.index = i;
    ds.group = spec.group;
    ds.ground_truth = random_model(spec.n_hidden, spec.m, dims_of(spec.group), rng);
    ds.sequence = sample_sequence(ds.ground_truth, spec.length, rng);
    out.push_back(std::move(ds));
  }
  return out;
}

void write_datasets(const std::vector<Dataset>& datasets, const DatasetSpec& spec,
                    const std::filesystem::path& dir) {
  for (const auto& ds : datasets) {
    const auto stem = std::to_string(ds.index);
    write_sequence_file(dir / ("seq_" + stem + ".txt"), ds.sequence,
                        {spec.n_hidden, spec.m, ds.sequence.dims(), spec.seed});
    write_model_file(dir / ("truth_" + stem + ".json"), ds.ground_truth);
  }
}

std::vector<Dataset> load_datasets(const std::filesystem::path& dir) {
  std::vector<Dataset> out;
  for (std::size_t i = 0;; ++i) {
    const auto seq_path = dir / ("seq_" + std::to_string(i) + ".txt");
    if (!std::filesystem::exists(seq_path)) break;
    auto file = read_sequence_file(seq_path);
    Dataset ds;
    ds.index = i;
    ds.group = file.sequence.dims() == 1 ? Group::one_dim : Group::two_dim;
    ds.sequence = std::move(file.sequence);
    const auto truth_path = dir / ("truth_" + std::to_string(i) + ".json");
    if (std::filesystem::exists(truth_path)) ds.ground_truth = read_model_file(truth_path);
    out.push_back(std::move(ds));
  }
  if (out.empty()) throw std::runtime_error("no seq_0.txt found in " + dir.string());
  return out;
}

std::string RunTrace::run_id() const {
  return "d" + std::to_string(dataset) + "_s" + std::to_string(seed);
}

nlohmann::json ComparisonSettings::to_json() const {
  return {{"particles", pso.particle_count},
          {"iterations", pso.iterations},
          {"omega", pso.omega},
          {"c1", pso.c1},
          {"c2", pso.c2},
          {"topology", to_string(pso.topology)},
          {"neighborhood_k", pso.neighborhood_k},
          {"bw_iterations", bw_iterations},
          {"seeds", seeds},
          {"n", n_hidden}};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct JobResult {
  ComparisonRow pso;
  ComparisonRow bw;
  RunTrace trace;
};

JobResult run_pair(const Dataset& ds, std::uint64_t seed, const ComparisonSettings& settings) {
  const auto& obs = ds.sequence;
  const std::size_t n = settings.n_hidden;
  const std::size_t d = obs.dims();
  // m comes from the generating model when known, else from the data.
  const std::size_t m =
      ds.ground_truth.m != 0 ? ds.ground_truth.m : static_cast<std::size_t>(obs.max_symbol()) + 1;

  JobResult job;
  job.trace.dataset = ds.index;
  job.trace.seed = seed;

  auto& pso = job.pso;
  pso.dataset = ds.index;
  pso.group = ds.group;
  pso.method = Method::pso;
  pso.seed = seed;
  pso.iterations = settings.pso.iterations;
  try {
    SwarmConfig cfg = settings.pso;
    cfg.seed = seed;
    const auto start = Clock::now();
    auto res = pso_train(obs, n, m, d, cfg);
    pso.wall_seconds = seconds_since(start);
    pso.initial_loglik = res.trace.gbest.front();
    pso.final_loglik = res.gbest_fitness;
    pso.evaluations = res.evaluations;
    job.trace.pso = std::move(res.trace);
    if (!std::isfinite(pso.final_loglik)) pso.error = "non-finite log-likelihood";
  } catch (const std::exception& e) {
    pso.error = e.what();
  }

  auto& bw = job.bw;
  bw.dataset = ds.index;
  bw.group = ds.group;
  bw.method = Method::baum_welch;
  bw.seed = seed;
  bw.iterations = settings.bw_iterations;
  try {
    Rng rng(seed);
    const auto init = random_model(n, m, d, rng);
    const auto start = Clock::now();
    auto res = baum_welch_train(init, obs, settings.bw_iterations);
    bw.wall_seconds = seconds_since(start);
    bw.initial_loglik = res.trace.front();
    bw.final_loglik = res.trace.back();
    bw.evaluations = res.trace.size();
    job.trace.bw = std::move(res.trace);
    if (!std::isfinite(bw.final_loglik)) bw.error = "non-finite log-likelihood";
  } catch (const std::exception& e) {
    bw.error = e.what();
  }
  return job;
}

}  // namespace

ExperimentReport run_comparison(const std::vector<Dataset>& datasets,
                                const ComparisonSettings& settings) {
  if (datasets.empty()) throw std::invalid_argument("run_comparison: no datasets");
  if (settings.seeds.empty()) throw std::invalid_argument("run_comparison: no seeds");
  settings.pso.validate();

  const std::size_t jobs = datasets.size() * settings.seeds.size();
  std::vector<JobResult> results(jobs);
  const auto work = [&](std::size_t job) {
    const auto& ds = datasets[job / settings.seeds.size()];
    results[job] = run_pair(ds, settings.seeds[job % settings.seeds.size()], settings);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(settings.threads, jobs));
  if (threads == 1) {
    for (std::size_t j = 0; j < jobs; ++j) work(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) work(j);
      });
    }
  }

  ExperimentReport report;
  report.config = settings.to_json();
  report.config["datasets"] = datasets.size();
  for (auto& r : results) {
    report.rows.push_back(std::move(r.pso));
    report.rows.push_back(std::move(r.bw));
    report.traces.push_back(std::move(r.trace));
  }
  return report;
}

namespace {

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json series(const std::vector<double>& values) {
  auto arr = nlohmann::json::array();
  for (double v : values) arr.push_back(number_or_null(v));
  return arr;
}

}  // namespace

nlohmann::json report_to_json(const ExperimentReport& report) {
  auto rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"dataset", r.dataset},
                    {"group", to_string(r.group)},
                    {"method", to_string(r.method)},
                    {"seed", r.seed},
                    {"initial_loglik", number_or_null(r.initial_loglik)},
                    {"final_loglik", number_or_null(r.final_loglik)},
                    {"iterations", r.iterations},
                    {"evaluations", r.evaluations},
                    {"error", r.error}});
  }
  auto traces = nlohmann::json::array();
  for (const auto& t : report.traces) {
    traces.push_back({{"run", t.run_id()},
                      {"dataset", t.dataset},
                      {"seed", t.seed},
                      {"pso",
                       {{"gbest_loglik", series(t.pso.gbest)},
                        {"mean_pbest_gap", series(t.pso.mean_pbest_gap)}}},
                      {"bw", series(t.bw)}});
  }
  return {{"config", report.config}, {"rows", std::move(rows)}, {"traces", std::move(traces)}};
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const std::filesystem::path& out_dir,
                                               const EmitOptions& options) {
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::string& name, const std::string& content) {
    const auto path = out_dir / name;
    write_text_file(path, content);
    written.push_back(path);
  };

  std::ostringstream cmp;
  cmp << "dataset,group,method,seed,initial_loglik,final_loglik,iterations,evaluations,status\n";
  for (const auto& r : report.rows) {
    cmp << r.dataset << ',' << to_string(r.group) << ',' << to_string(r.method) << ',' << r.seed
        << ',' << format_double(r.initial_loglik) << ',' << format_double(r.final_loglik) << ','
        << r.iterations << ',' << r.evaluations << ',' << (r.ok() ? "ok" : "error") << '\n';
  }
  emit("comparison.csv", cmp.str());

  for (const auto& t : report.traces) {
    std::ostringstream pso;
    pso << "iteration,gbest_loglik,mean_pbest_gap\n";
    for (std::size_t i = 0; i < t.pso.gbest.size(); ++i) {
      pso << i << ',' << format_double(t.pso.gbest[i]) << ','
          << format_double(t.pso.mean_pbest_gap[i]) << '\n';
    }
    emit("pso_trace_" + t.run_id() + ".csv", pso.str());

    std::ostringstream conv;
    conv << "method,iteration,loglik\n";
    for (std::size_t i = 0; i < t.pso.gbest.size(); ++i) {
      conv << to_string(Method::pso) << ',' << i << ',' << format_double(t.pso.gbest[i]) << '\n';
    }
    for (std::size_t i = 0; i < t.bw.size(); ++i) {
      conv << to_string(Method::baum_welch) << ',' << i << ',' << format_double(t.bw[i]) << '\n';
    }
    emit("convergence_" + t.run_id() + ".csv", conv.str());
  }

  emit("report.json", report_to_json(report).dump(2) + "\n");

  if (options.include_timing) {
    std::ostringstream timing;
    timing << "dataset,method,seed,wall_seconds\n";
    for (const auto& r : report.rows) {
      timing << r.dataset << ',' << to_string(r.method) << ',' << r.seed << ','
             << format_double(r.wall_seconds) << '\n';
    }
    emit("timing.csv", timing.str());
  }
  return written;
}

std::size_t ComparisonSummary::datasets_pso_mean_ahead() const {
  return static_cast<std::size_t>(std::count_if(
      datasets.begin(), datasets.end(),
      [](const DatasetSummary& s) { return s.pairs > 0 && s.pso_mean >= s.bw_mean; }));
}

ComparisonSummary summarize(const ExperimentReport& report) {
  ComparisonSummary summary;
  std::map<std::pair<std::size_t, std::uint64_t>, std::pair<const ComparisonRow*, const ComparisonRow*>>
      pairs;
  for (const auto& r : report.rows) {
    if (!r.ok()) ++summary.error_rows;
    auto& slot = pairs[{r.dataset, r.seed}];
    (r.method == Method::pso ? slot.first : slot.second) = &r;
  }
  std::map<std::size_t, DatasetSummary> per_dataset;
  for (const auto& [key, rows] : pairs) {
    auto& s = per_dataset[key.first];
    s.dataset = key.first;
    const auto* pso = rows.first;
    const auto* bw = rows.second;
    if (pso == nullptr || bw == nullptr || !pso->ok() || !bw->ok()) continue;
    ++s.pairs;
    s.pso_mean += pso->final_loglik;
    s.bw_mean += bw->final_loglik;
    if (pso->final_loglik >= bw->final_loglik) ++s.pso_wins;
  }
  for (auto& [idx, s] : per_dataset) {
    if (s.pairs > 0) {
      s.pso_mean /= static_cast<double>(s.pairs);
      s.bw_mean /= static_cast<double>(s.pairs);
    }
    summary.pairs += s.pairs;
    summary.pso_wins += s.pso_wins;
    summary.datasets.push_back(s);
  }
  return summary;
}

}  // namespace psohmm
