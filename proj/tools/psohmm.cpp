// psohmm: generate datasets, train (PSO or Baum-Welch), decode, sample and
// run the PSO-vs-Baum-Welch comparison from the command line.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "psohmm/config.hpp"
#include "psohmm/harness.hpp"
#include "psohmm/hmm.hpp"
#include "psohmm/io.hpp"
#include "psohmm/pso.hpp"

namespace {

using psohmm::CliConfig;

// Flag values; only those actually given override the config file.
struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string config_path;
  bool show_config = false;

  std::optional<std::string> group;
  std::optional<std::size_t> count, t, m, n;
  std::optional<std::size_t> particles, pso_iters, bw_iters, seeds, neighborhood_k;
  std::optional<double> omega, c1, c2;
  std::optional<std::string> topology;
  std::optional<unsigned> threads;

  // train
  std::string method = "pso";
  std::optional<std::size_t> iters;
  std::string input, model_out, trace_out;
  // decode / sample
  std::string model_path, sequence_path, output;
  std::size_t sample_length = 0;
  // compare
  std::string data_dir;
  bool timing = false;
};

void add_swarm_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--particles", f.particles, "Swarm size");
  cmd->add_option("--omega", f.omega, "Inertia weight");
  cmd->add_option("--c1", f.c1, "Personal-best acceleration");
  cmd->add_option("--c2", f.c2, "Social-best acceleration");
  cmd->add_option("--topology", f.topology, "global | ring");
  cmd->add_option("--neighborhood-k", f.neighborhood_k, "Ring neighbourhood radius");
}

void add_dataset_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--group", f.group, "1dim | 2dim");
  cmd->add_option("--count", f.count, "Number of sequences");
  cmd->add_option("--t", f.t, "Sequence length");
  cmd->add_option("--m", f.m, "Observation symbols per dimension");
  cmd->add_option("--n", f.n, "Hidden states");
}

CliConfig resolve(const Flags& f) {
  CliConfig cfg;
  if (!f.config_path.empty()) cfg.apply_file(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.group) cfg.dataset.group = psohmm::group_from_string(*f.group);
  if (f.count) cfg.dataset.sequence_count = *f.count;
  if (f.t) cfg.dataset.length = *f.t;
  if (f.m) cfg.dataset.m = *f.m;
  if (f.n) cfg.dataset.n_hidden = *f.n;
  if (f.particles) cfg.swarm.particle_count = *f.particles;
  if (f.pso_iters) cfg.swarm.iterations = *f.pso_iters;
  if (f.bw_iters) cfg.bw_iterations = *f.bw_iters;
  if (f.seeds) cfg.seed_count = *f.seeds;
  if (f.omega) cfg.swarm.omega = *f.omega;
  if (f.c1) cfg.swarm.c1 = *f.c1;
  if (f.c2) cfg.swarm.c2 = *f.c2;
  if (f.topology) cfg.swarm.topology = psohmm::topology_from_string(*f.topology);
  if (f.neighborhood_k) cfg.swarm.neighborhood_k = *f.neighborhood_k;
  if (f.threads) cfg.threads = *f.threads;
  cfg.dataset.seed = cfg.seed;
  cfg.swarm.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

std::filesystem::path out_path(const CliConfig& cfg, const std::string& explicit_path,
                               const char* default_name) {
  return explicit_path.empty() ? std::filesystem::path(cfg.out_dir) / default_name
                               : std::filesystem::path(explicit_path);
}

int cmd_generate(const CliConfig& cfg) {
  const auto datasets = psohmm::generate_datasets(cfg.dataset);
  psohmm::write_datasets(datasets, cfg.dataset, cfg.out_dir);
  std::cout << "wrote " << datasets.size() << " sequences of length " << cfg.dataset.length
            << " to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_train(CliConfig cfg, const Flags& f) {
  if (f.input.empty()) throw std::invalid_argument("--input: a sequence file is required");
  const auto file = psohmm::read_sequence_file(f.input);
  const auto& obs = file.sequence;
  const std::size_t n = cfg.dataset.n_hidden;
  std::size_t m = obs.max_symbol() + 1;
  if (file.header.m) m = *file.header.m;
  if (f.m) m = *f.m;
  const std::size_t d = obs.dims();

  std::ostringstream trace;
  psohmm::HmmModel model;
  double final_loglik = psohmm::kNegInf;
  if (f.method == "pso") {
    if (f.iters) cfg.swarm.iterations = *f.iters;
    auto res = psohmm::pso_train(obs, n, m, d, cfg.swarm);
    trace << "iteration,gbest_loglik,mean_pbest_gap\n";
    for (std::size_t i = 0; i < res.trace.gbest.size(); ++i) {
      trace << i << ',' << psohmm::format_double(res.trace.gbest[i]) << ','
            << psohmm::format_double(res.trace.mean_pbest_gap[i]) << '\n';
    }
    model = std::move(res.model);
    final_loglik = res.gbest_fitness;
  } else if (f.method == "bw") {
    const std::size_t iterations = f.iters.value_or(cfg.bw_iterations);
    psohmm::Rng rng(cfg.seed);
    auto res = psohmm::baum_welch_train(psohmm::random_model(n, m, d, rng), obs, iterations);
    trace << "iteration,loglik\n";
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      trace << i << ',' << psohmm::format_double(res.trace[i]) << '\n';
    }
    model = std::move(res.model);
    final_loglik = res.trace.back();
  } else {
    throw std::invalid_argument("--method: expected 'pso' or 'bw', got '" + f.method + "'");
  }
  const auto model_file = out_path(cfg, f.model_out, "model.json");
  const auto trace_file = out_path(cfg, f.trace_out, "trace.csv");
  psohmm::write_model_file(model_file, model);
  psohmm::write_text_file(trace_file, trace.str());
  std::cout << "final log-likelihood: " << psohmm::format_double(final_loglik) << "\n"
            << "model: " << model_file.string() << "\ntrace: " << trace_file.string() << "\n";
  return 0;
}

int cmd_compare(const CliConfig& cfg, const Flags& f) {
  std::vector<psohmm::Dataset> datasets;
  nlohmann::json dataset_echo;
  if (!f.data_dir.empty()) {
    datasets = psohmm::load_datasets(f.data_dir);
    dataset_echo = {{"loaded_from", f.data_dir}, {"count", datasets.size()}};
  } else {
    datasets = psohmm::generate_datasets(cfg.dataset);
    psohmm::write_datasets(datasets, cfg.dataset, std::filesystem::path(cfg.out_dir) / "data");
  }
  auto report = psohmm::run_comparison(datasets, cfg.comparison_settings());
  report.config["cli"] = cfg.to_json();
  // Neither the output directory nor the thread count affects results; keep
  // them out of the echo so reports compare byte-for-byte.
  report.config["cli"].erase("threads");
  report.config["cli"].erase("out");
  if (!dataset_echo.is_null()) report.config["dataset"] = dataset_echo;
  psohmm::emit_report(report, cfg.out_dir, {f.timing});

  const auto summary = psohmm::summarize(report);
  std::cout << "rows: " << report.rows.size() << " (errors: " << summary.error_rows << ")\n";
  for (const auto& s : summary.datasets) {
    std::cout << "dataset " << s.dataset << ": PSOHMM mean " << psohmm::format_double(s.pso_mean)
              << ", BWHMM mean " << psohmm::format_double(s.bw_mean) << ", PSOHMM >= BWHMM on "
              << s.pso_wins << "/" << s.pairs << " seeds\n";
  }
  std::cout << "report: " << cfg.out_dir << "\n";
  return 0;
}

int cmd_decode(const Flags& f) {
  const auto model = psohmm::read_model_file(f.model_path);
  psohmm::require_valid(model);
  const auto file = psohmm::read_sequence_file(f.sequence_path);
  const auto res = psohmm::viterbi_decode(model, file.sequence);
  for (std::size_t t = 0; t < res.path.size(); ++t) std::cout << (t ? " " : "") << res.path[t];
  std::cout << "\nlog_probability: " << psohmm::format_double(res.log_probability) << "\n";
  return 0;
}

int cmd_sample(const CliConfig& cfg, const Flags& f) {
  if (f.sample_length == 0) throw std::invalid_argument("--t: must be at least 1");
  const auto model = psohmm::read_model_file(f.model_path);
  psohmm::Rng rng(cfg.seed);
  const auto seq = psohmm::sample_sequence(model, f.sample_length, rng);
  const auto path = out_path(cfg, f.output, "sample.txt");
  psohmm::write_sequence_file(path, seq, {model.n, model.m, model.d, cfg.seed});
  std::cout << "wrote " << seq.length() << " steps to " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden Markov model training with constrained particle swarms"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--seed", f.seed, "Master random seed");
  app.add_option("--config", f.config_path, "JSON config file (flags override it)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "Output directory");
  app.add_flag("--show-config", f.show_config, "Print the resolved config and exit");

  auto* generate = app.add_subcommand("generate", "Generate synthetic observation datasets");
  add_dataset_flags(generate, f);

  auto* train = app.add_subcommand("train", "Train a model on one sequence file");
  train->add_option("--method", f.method, "pso | bw")->check(CLI::IsMember({"pso", "bw"}));
  train->add_option("--input", f.input, "Sequence file")->check(CLI::ExistingFile);
  train->add_option("--iters", f.iters, "Iterations (default 10 for pso, 50 for bw)");
  train->add_option("--model-out", f.model_out, "Model output path (default <out>/model.json)");
  train->add_option("--trace-out", f.trace_out, "Trace CSV path (default <out>/trace.csv)");
  train->add_option("--n", f.n, "Hidden states");
  train->add_option("--m", f.m, "Observation symbols (default from the file header)");
  add_swarm_flags(train, f);

  auto* compare = app.add_subcommand("compare", "Run the PSOHMM vs BWHMM comparison");
  add_dataset_flags(compare, f);
  add_swarm_flags(compare, f);
  compare->add_option("--pso-iters", f.pso_iters, "PSO iterations");
  compare->add_option("--bw-iters", f.bw_iters, "Baum-Welch iterations");
  compare->add_option("--seeds", f.seeds, "Number of run seeds per dataset");
  compare->add_option("--data", f.data_dir, "Load seq_<i>.txt files instead of generating")
      ->check(CLI::ExistingDirectory);
  compare->add_option("--threads", f.threads, "Worker threads");
  compare->add_flag("--timing", f.timing, "Also write timing.csv");

  auto* decode = app.add_subcommand("decode", "Most probable hidden path for a sequence");
  decode->add_option("--model", f.model_path, "Model file")->required()->check(CLI::ExistingFile);
  decode->add_option("--sequence", f.sequence_path, "Sequence file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* sample = app.add_subcommand("sample", "Sample an observation sequence from a model");
  sample->add_option("--model", f.model_path, "Model file")->required()->check(CLI::ExistingFile);
  sample->add_option("--t", f.sample_length, "Sequence length")->required();
  sample->add_option("--output", f.output, "Output path (default <out>/sample.txt)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const CliConfig cfg = resolve(f);
    if (f.show_config) {
      std::cout << cfg.to_json().dump(2) << "\n";
      return 0;
    }
    if (generate->parsed()) return cmd_generate(cfg);
    if (train->parsed()) return cmd_train(cfg, f);
    if (compare->parsed()) return cmd_compare(cfg, f);
    if (decode->parsed()) return cmd_decode(f);
    if (sample->parsed()) return cmd_sample(cfg, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
