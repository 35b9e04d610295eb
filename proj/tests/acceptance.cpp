// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Optional argv[1]: path to the psohmm CLI, used for the
// end-to-end determinism check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "psohmm/config.hpp"
#include "psohmm/harness.hpp"
#include "psohmm/hmm.hpp"
#include "psohmm/io.hpp"
#include "psohmm/pso.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace psohmm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // <= 0: no limit
  std::function<Outcome()> run;
};

std::string fmt(double v) { return format_double(v); }

ObservationSequence experiment_shaped_data(std::uint64_t seed, std::size_t d) {
  Rng rng(seed);
  return sample_sequence(random_model(2, 5, d, rng), 100, rng);
}

bool entries_and_sums_ok(const Position& p, const ParameterLayout& layout) {
  for (double v : p.values) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  for (const auto row : layout.rows()) {
    double s = 0.0;
    for (std::size_t k = 0; k < row.length; ++k) s += p.values[row.offset + k];
    if (!(std::abs(s - 1.0) <= 1e-9)) return false;
  }
  return true;
}

Outcome oracle_equivalence() {
  Rng rng(20240101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const std::size_t m = 2 + (trial / 3) % 2;
    const std::size_t d = 1 + (trial / 6) % 2;
    const std::size_t T = 1 + static_cast<std::size_t>(rng.uniform() * 6);
    const auto model = random_model(n, m, d, rng);
    const auto obs = testing::random_symbols(T, m, d, rng);
    worst = std::max(worst, std::abs(forward_log_likelihood(model, obs) -
                                     brute_force_log_likelihood(model, obs)));
  }
  return {worst < 1e-10, "max |forward - brute force| = " + fmt(worst) + " over 100 instances"};
}

Outcome em_monotonicity() {
  double worst_drop = 0.0;
  std::size_t invalid = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto obs = experiment_shaped_data(1000 + seed, 1);
    Rng rng(seed);
    HmmModel model = random_model(2, 5, 1, rng);
    double prev = forward_log_likelihood(model, obs);
    for (int it = 0; it < 50; ++it) {
      model = baum_welch_step(model, obs);
      if (!is_valid(model)) ++invalid;
      const double ll = forward_log_likelihood(model, obs);
      worst_drop = std::max(worst_drop, prev - ll);
      prev = ll;
    }
  }
  return {worst_drop <= 1e-9 && invalid == 0,
          "largest per-step decrease " + fmt(worst_drop) + ", invalid intermediate models " +
              std::to_string(invalid)};
}

Outcome constraint_closure() {
  std::size_t checked = 0, bad = 0;
  for (std::size_t d : {1, 2}) {
    const ParameterLayout layout{2, 5, d};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto obs = experiment_shaped_data(2000 + seed, d);
      SwarmConfig cfg;
      cfg.seed = seed;
      pso_train(obs, 2, 5, d, cfg, [&](const IterationView& view) {
        for (const auto& p : view.particles) {
          ++checked;
          if (!entries_and_sums_ok(p.position, layout) ||
              !is_valid(decode(p.position, 2, 5, d))) {
            ++bad;
          }
        }
      });
    }
  }
  return {bad == 0 && checked == 2 * 10 * 25 * 11,
          std::to_string(checked) + " particle states checked, " + std::to_string(bad) +
              " infeasible"};
}

Outcome gbest_and_resync() {
  std::size_t updates = 0, mismatches = 0, decreases = 0;
  for (auto topology : {Topology::global_best, Topology::ring}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto obs = experiment_shaped_data(3000 + seed, 1 + seed % 2);
      SwarmConfig cfg;
      cfg.seed = seed;
      cfg.topology = topology;
      const std::size_t d = 1 + seed % 2;
      const auto res = pso_train(obs, 2, 5, d, cfg, [&](const IterationView& view) {
        if (view.iteration == 0) return;
        for (std::size_t i = 0; i < view.particles.size(); ++i) {
          ++updates;
          const auto& p = view.particles[i];
          if (position_update(view.previous_positions[i], p.velocity) != p.position) ++mismatches;
        }
      });
      for (std::size_t i = 1; i < res.trace.gbest.size(); ++i) {
        if (res.trace.gbest[i] < res.trace.gbest[i - 1]) ++decreases;
      }
    }
  }
  return {mismatches == 0 && decreases == 0 && updates > 0,
          std::to_string(updates) + " updates, " + std::to_string(mismatches) +
              " resync mismatches, " + std::to_string(decreases) + " gbest decreases"};
}

Outcome repair_correctness() {
  Rng rng(5);
  std::size_t outside = 0, moved = 0;
  for (int i = 0; i < 100000; ++i) {
    const double psi = -5.0 + 11.0 * rng.uniform();
    const double out = remap_entry(psi, rng);
    if (!(out >= 0.0 && out <= 1.0)) ++outside;
    if (psi >= 0.0 && psi <= 1.0 && out != psi) ++moved;
  }
  const double a = remap_value(1.2, 0.5);
  const double b = remap_value(-0.3, 1.0);
  const bool forced = std::abs(a - 0.9) < 1e-15 && std::abs(b - 0.3) < 1e-15;
  return {outside == 0 && moved == 0 && forced,
          std::to_string(outside) + " outside [0,1], " + std::to_string(moved) +
              " in-bounds moved, forced cases " + fmt(a) + " / " + fmt(b)};
}

Outcome comparison_reproduction(const fs::path& artifacts) {
  std::ostringstream detail;
  bool pass = true;
  std::size_t pairs = 0, wins = 0;
  for (Group group : {Group::one_dim, Group::two_dim}) {
    CliConfig cfg;
    cfg.dataset.group = group;
    auto report = run_comparison(generate_datasets(cfg.dataset), cfg.comparison_settings());
    report.config["cli"] = cfg.to_json();
    emit_report(report, artifacts / ("comparison_" + to_string(group)));
    const auto s = summarize(report);
    pairs += s.pairs;
    wins += s.pso_wins;
    const auto ahead = s.datasets_pso_mean_ahead();
    if (ahead < 4 || s.error_rows > 0) pass = false;
    detail << to_string(group) << ": PSOHMM >= BWHMM on " << s.pso_wins << "/" << s.pairs
           << " pairs, mean ahead on " << ahead << "/" << s.datasets.size() << " datasets";
    for (const auto& ds : s.datasets) {
      detail << " [d" << ds.dataset << " " << fmt(ds.pso_mean) << " vs " << fmt(ds.bw_mean) << "]";
    }
    detail << "; ";
  }
  const double fraction = pairs ? static_cast<double>(wins) / static_cast<double>(pairs) : 0.0;
  if (fraction < 0.6) pass = false;
  detail << "overall win fraction " << fmt(fraction) << " (gate 0.6); traces in "
         << artifacts.string();
  return {pass, detail.str()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

Outcome convergence_artifacts(const fs::path& artifacts) {
  CliConfig cfg;
  cfg.seed_count = 3;
  const auto report = run_comparison(generate_datasets(cfg.dataset), cfg.comparison_settings());
  const auto dir = artifacts / "convergence";
  emit_report(report, dir);
  std::size_t files = 0;
  std::vector<std::string> problems;
  for (const auto& t : report.traces) {
    const auto pso = read_csv(dir / ("pso_trace_" + t.run_id() + ".csv"));
    const auto conv = read_csv(dir / ("convergence_" + t.run_id() + ".csv"));
    ++files;
    if (pso.empty() || pso[0] != std::vector<std::string>{"iteration", "gbest_loglik", "mean_pbest_gap"}) {
      problems.push_back(t.run_id() + ": bad pso_trace header");
      continue;
    }
    if (pso.size() != cfg.swarm.iterations + 2) problems.push_back(t.run_id() + ": pso rows");
    for (std::size_t r = 2; r < pso.size(); ++r) {
      if (std::stod(pso[r][1]) < std::stod(pso[r - 1][1])) {
        problems.push_back(t.run_id() + ": gbest decreases at row " + std::to_string(r));
      }
    }
    std::size_t bw_rows = 0, pso_rows = 0;
    for (std::size_t r = 1; r < conv.size(); ++r) {
      if (conv[r].size() != 3) problems.push_back(t.run_id() + ": malformed convergence row");
      else if (conv[r][0] == "BWHMM") ++bw_rows;
      else if (conv[r][0] == "PSOHMM") ++pso_rows;
    }
    if (bw_rows != cfg.bw_iterations + 1 || pso_rows != cfg.swarm.iterations + 1) {
      problems.push_back(t.run_id() + ": convergence row counts");
    }
  }
  // Trend of the pbest gap is reported, not gated.
  double first_gap = 0.0, last_gap = 0.0;
  for (const auto& t : report.traces) {
    first_gap += t.pso.mean_pbest_gap.front();
    last_gap += t.pso.mean_pbest_gap.back();
  }
  const double runs = static_cast<double>(report.traces.size());
  std::string detail = std::to_string(files) + " runs checked; mean pbest gap " +
                       fmt(first_gap / runs) + " -> " + fmt(last_gap / runs) + " (not gated)";
  if (!problems.empty()) detail += "; first problem: " + problems.front();
  return {problems.empty(), detail};
}

Outcome viterbi_optimality() {
  Rng rng(808);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const std::size_t T = 1 + static_cast<std::size_t>(rng.uniform() * 6);
    const auto model = random_model(n, 3, 1 + trial % 2, rng);
    const auto obs = testing::random_symbols(T, 3, model.d, rng);
    const auto res = viterbi_decode(model, obs);
    const auto oracle = testing::enumerate_paths(model, obs);
    worst = std::max(worst, std::abs(res.log_probability - std::log(oracle.best)));
    worst = std::max(worst, std::abs(path_log_probability(model, obs, res.path) - std::log(oracle.best)));
  }
  return {worst <= 1e-12, "max |viterbi - enumerated max| = " + fmt(worst) + " over 50 instances"};
}

std::vector<std::pair<std::string, std::string>> directory_contents(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.emplace_back(fs::relative(entry.path(), dir).string(), read_text_file(entry.path()));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome determinism(const fs::path& artifacts, const std::string& cli) {
  const auto a = artifacts / "determinism_a";
  const auto b = artifacts / "determinism_b";
  fs::remove_all(a);
  fs::remove_all(b);
  std::string route;
  if (!cli.empty()) {
    route = "CLI";
    for (const auto& dir : {a, b}) {
      const std::string cmd = "\"" + cli + "\" compare --seed 3 --out \"" + dir.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "compare exited nonzero"};
    }
  } else {
    route = "library";
    CliConfig cfg;
    cfg.seed = 3;
    cfg.dataset.seed = 3;
    for (const auto& dir : {a, b}) {
      auto report = run_comparison(generate_datasets(cfg.dataset), cfg.comparison_settings());
      report.config["cli"] = cfg.to_json();
      emit_report(report, dir);
    }
  }
  const auto fa = directory_contents(a);
  const auto fb = directory_contents(b);
  return {!fa.empty() && fa == fb,
          route + " route: " + std::to_string(fa.size()) + " files, " +
              (fa == fb ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path artifacts = fs::temp_directory_path() / "psohmm_acceptance";
  fs::create_directories(artifacts);

  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence (forward vs path enumeration)", 5.0, oracle_equivalence},
      {2, "EM monotonicity (20 instances x 50 iterations)", 10.0, em_monotonicity},
      {3, "constraint closure under PSO (25 particles, 10 iterations, 10 seeds)", 30.0,
       constraint_closure},
      {4, "gbest monotonicity and velocity resync consistency", 0.0, gbest_and_resync},
      {5, "repair correctness (1e5 scalars)", 1.0, repair_correctness},
      {6, "PSOHMM vs BWHMM comparison reproduction", 120.0,
       [&] { return comparison_reproduction(artifacts); }},
      {7, "convergence artifacts", 0.0, [&] { return convergence_artifacts(artifacts); }},
      {8, "Viterbi optimality (50 instances)", 0.0, viterbi_optimality},
      {9, "compare determinism (byte-identical reports)", 0.0,
       [&] { return determinism(artifacts, cli); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      out.pass = false;
      out.detail += "; exceeded time limit " + fmt(c.time_limit_s) + " s";
    }
    if (!out.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%.3f s) -- %s\n", out.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
