#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psohmm/harness.hpp"
#include "psohmm/pso.hpp"

namespace psohmm {

/// Fully resolved settings for every subcommand.
///
/// Resolution order is defaults, then the config file, then command-line
/// flags. The config file is a flat JSON object using the keys listed in
/// `CliConfig::keys()`; unknown keys are rejected.
struct CliConfig {
  DatasetSpec dataset;
  SwarmConfig swarm;
  std::size_t bw_iterations = 50;
  std::size_t seed_count = 10;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  unsigned threads = 1;

  static const std::vector<std::string>& keys();

  /// Overlay the keys present in `doc`. Throws std::invalid_argument naming
  /// the offending key on a bad value.
  void apply(const nlohmann::json& doc);
  void apply_file(const std::filesystem::path& path);

  /// seed, seed+1, ..., seed+seed_count-1
  std::vector<std::uint64_t> run_seeds() const;
  ComparisonSettings comparison_settings() const;

  void validate() const;
  nlohmann::json to_json() const;
};

}  // namespace psohmm
