#include "psohmm/config.hpp"

#include <algorithm>

#include "psohmm/io.hpp"

namespace psohmm {

const std::vector<std::string>& CliConfig::keys() {
  static const std::vector<std::string> all = {
      "particles", "iterations", "omega", "c1",  "c2",    "topology",      "neighborhood_k",
      "seed",      "group",      "count", "t",   "m",     "n",             "bw_iterations",
      "seeds",     "out",        "threads"};
  return all;
}

namespace {

template <typename T>
T get_as(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw std::invalid_argument(key + ": expected a string");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw std::invalid_argument(key + ": expected a number");
  } else {
    if (!v.is_number_integer() || v.template get<std::int64_t>() < 0) {
      throw std::invalid_argument(key + ": expected a non-negative integer");
    }
  }
  return v.get<T>();
}

}  // namespace

void CliConfig::apply(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(keys().begin(), keys().end(), key) == keys().end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  const auto has = [&](const char* k) { return doc.contains(k); };
  if (has("particles")) swarm.particle_count = get_as<std::size_t>(doc, "particles");
  if (has("iterations")) swarm.iterations = get_as<std::size_t>(doc, "iterations");
  if (has("omega")) swarm.omega = get_as<double>(doc, "omega");
  if (has("c1")) swarm.c1 = get_as<double>(doc, "c1");
  if (has("c2")) swarm.c2 = get_as<double>(doc, "c2");
  if (has("topology")) swarm.topology = topology_from_string(get_as<std::string>(doc, "topology"));
  if (has("neighborhood_k")) swarm.neighborhood_k = get_as<std::size_t>(doc, "neighborhood_k");
  if (has("seed")) seed = get_as<std::uint64_t>(doc, "seed");
  if (has("group")) dataset.group = group_from_string(get_as<std::string>(doc, "group"));
  if (has("count")) dataset.sequence_count = get_as<std::size_t>(doc, "count");
  if (has("t")) dataset.length = get_as<std::size_t>(doc, "t");
  if (has("m")) dataset.m = get_as<std::size_t>(doc, "m");
  if (has("n")) dataset.n_hidden = get_as<std::size_t>(doc, "n");
  if (has("bw_iterations")) bw_iterations = get_as<std::size_t>(doc, "bw_iterations");
  if (has("seeds")) seed_count = get_as<std::size_t>(doc, "seeds");
  if (has("out")) out_dir = get_as<std::string>(doc, "out");
  if (has("threads")) threads = get_as<unsigned>(doc, "threads");
}

void CliConfig::apply_file(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  apply(doc);
}

std::vector<std::uint64_t> CliConfig::run_seeds() const {
  std::vector<std::uint64_t> out(seed_count);
  for (std::size_t k = 0; k < seed_count; ++k) out[k] = seed + k;
  return out;
}

ComparisonSettings CliConfig::comparison_settings() const {
  ComparisonSettings s;
  s.pso = swarm;
  s.bw_iterations = bw_iterations;
  s.seeds = run_seeds();
  s.n_hidden = dataset.n_hidden;
  s.threads = threads;
  return s;
}

void CliConfig::validate() const {
  swarm.validate();
  dataset.validate();
  if (seed_count == 0) throw std::invalid_argument("seeds: must be at least 1");
}

nlohmann::json CliConfig::to_json() const {
  return {{"particles", swarm.particle_count},
          {"iterations", swarm.iterations},
          {"omega", swarm.omega},
          {"c1", swarm.c1},
          {"c2", swarm.c2},
          {"topology", to_string(swarm.topology)},
          {"neighborhood_k", swarm.neighborhood_k},
          {"seed", seed},
          {"group", to_string(dataset.group)},
          {"count", dataset.sequence_count},
          {"t", dataset.length},
          {"m", dataset.m},
          {"n", dataset.n_hidden},
          {"bw_iterations", bw_iterations},
          {"seeds", seed_count},
          {"out", out_dir},
          {"threads", threads}};
}

}  // namespace psohmm
