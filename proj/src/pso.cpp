#include "psohmm/pso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace psohmm {

std::vector<ParameterLayout::Row> ParameterLayout::rows() const {
  std::vector<Row> out;
  out.reserve(1 + n + d * n);
  out.push_back({0, n});
  for (std::size_t i = 0; i < n; ++i) out.push_back({trans_offset() + i * n, n});
  for (std::size_t row = 0; row < d * n; ++row) out.push_back({emit_offset() + row * m, m});
  return out;
}

std::string to_string(Topology topology) {
  return topology == Topology::global_best ? "global" : "ring";
}

Topology topology_from_string(const std::string& name) {
  if (name == "global" || name == "gbest") return Topology::global_best;
  if (name == "ring" || name == "lbest" || name == "local") return Topology::ring;
  throw std::invalid_argument("topology: expected 'global' or 'ring', got '" + name + "'");
}

void SwarmConfig::validate() const {
  if (particle_count < 1) throw std::invalid_argument("particles: must be at least 1");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega: must be >= 0");
  if (!(c1 >= 0.0) || !std::isfinite(c1)) throw std::invalid_argument("c1: must be >= 0");
  if (!(c2 >= 0.0) || !std::isfinite(c2)) throw std::invalid_argument("c2: must be >= 0");
  if (topology == Topology::ring && neighborhood_k < 1) {
    throw std::invalid_argument("neighborhood_k: must be at least 1 for the ring topology");
  }
}

Position encode(const HmmModel& model) {
  Position pos;
  pos.values.reserve(model.pi.size() + model.trans.size() + model.emit.size());
  pos.values.insert(pos.values.end(), model.pi.begin(), model.pi.end());
  pos.values.insert(pos.values.end(), model.trans.begin(), model.trans.end());
  pos.values.insert(pos.values.end(), model.emit.begin(), model.emit.end());
  return pos;
}

HmmModel decode(const Position& position, std::size_t n, std::size_t m, std::size_t d) {
  const ParameterLayout layout{n, m, d};
  if (position.size() != layout.size()) {
    throw std::invalid_argument("decode: position has length " + std::to_string(position.size()) +
                                ", layout needs " + std::to_string(layout.size()));
  }
  HmmModel model(n, m, d);
  const auto& v = position.values;
  const auto at = [&](std::size_t off) { return v.begin() + static_cast<std::ptrdiff_t>(off); };
  std::copy(at(0), at(n), model.pi.begin());
  std::copy(at(layout.trans_offset()), at(layout.emit_offset()), model.trans.begin());
  std::copy(at(layout.emit_offset()), v.end(), model.emit.begin());
  require_valid(model);
  return model;
}

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": vector lengths disagree");
}

}  // namespace

Velocity velocity_update(const Particle& particle, const Position& gbest,
                         const SwarmConfig& cfg, std::span<const double> xi1,
                         std::span<const double> xi2) {
  const auto size = particle.position.size();
  require_same_size(size, particle.velocity.size(), "velocity_update");
  require_same_size(size, particle.pbest_position.size(), "velocity_update");
  require_same_size(size, gbest.size(), "velocity_update");
  require_same_size(size, xi1.size(), "velocity_update");
  require_same_size(size, xi2.size(), "velocity_update");
  Velocity next;
  next.values.resize(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double x = particle.position.values[k];
    next.values[k] = cfg.omega * particle.velocity.values[k] +
                     cfg.c1 * xi1[k] * (particle.pbest_position.values[k] - x) +
                     cfg.c2 * xi2[k] * (gbest.values[k] - x);
  }
  return next;
}

Velocity velocity_update(const Particle& particle, const Position& gbest,
                         const SwarmConfig& cfg, Rng& rng) {
  const auto size = particle.position.size();
  std::vector<double> xi1(size), xi2(size);
  for (std::size_t k = 0; k < size; ++k) {
    xi1[k] = rng.uniform();
    xi2[k] = rng.uniform();
  }
  return velocity_update(particle, gbest, cfg, xi1, xi2);
}

Position position_update(const Position& position, const Velocity& velocity) {
  require_same_size(position.size(), velocity.size(), "position_update");
  Position next;
  next.values.resize(position.size());
  for (std::size_t k = 0; k < position.size(); ++k) {
    next.values[k] = position.values[k] + velocity.values[k];
  }
  return next;
}

double remap_value(double psi, double xi) {
  if (psi > kUpperBound) return kUpperBound - xi * (psi - kUpperBound);
  if (psi < kLowerBound) return kLowerBound + xi * (kLowerBound - psi);
  return psi;
}

double remap_entry(double psi, Rng& rng) {
  for (int round = 0; round < kMaxRemapRounds; ++round) {
    if (psi >= kLowerBound && psi <= kUpperBound) return psi;
    psi = remap_value(psi, rng.uniform());
  }
  return std::clamp(psi, kLowerBound, kUpperBound);
}

Position remap_repair(const Position& raw, Rng& rng) {
  Position out = raw;
  for (double& v : out.values) {
    if (std::isnan(v)) throw std::invalid_argument("remap_repair: NaN coordinate");
    v = remap_entry(v, rng);
  }
  return out;
}

Position renormalize(const Position& position, const ParameterLayout& layout) {
  require_same_size(position.size(), layout.size(), "renormalize");
  Position out = position;
  for (const auto row : layout.rows()) {
    auto span = std::span<double>(out.values).subspan(row.offset, row.length);
    const double sum = std::accumulate(span.begin(), span.end(), 0.0);
    if (sum > 0.0) {
      for (double& v : span) v /= sum;
    } else {
      std::fill(span.begin(), span.end(), 1.0 / static_cast<double>(row.length));
    }
  }
  return out;
}

Velocity velocity_resync(const Position& old_position, const Position& repaired_position) {
  require_same_size(old_position.size(), repaired_position.size(), "velocity_resync");
  Velocity v;
  v.values.resize(old_position.size());
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    v.values[k] = repaired_position.values[k] - old_position.values[k];
  }
  return v;
}

double fitness(const Position& position, const ObservationSequence& obs, std::size_t n,
               std::size_t m, std::size_t d) {
  return forward_log_likelihood(decode(position, n, m, d), obs);
}

namespace {

std::size_t swarm_best(const std::vector<Particle>& swarm) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < swarm.size(); ++j) {
    if (swarm[j].pbest_fitness > swarm[best].pbest_fitness) best = j;
  }
  return best;
}

// Best pbest among the ring neighbours i-k .. i+k; ties go to the lower index.
std::size_t ring_best(const std::vector<Particle>& swarm, std::size_t i, std::size_t k) {
  const std::size_t count = swarm.size();
  if (2 * k + 1 >= count) return swarm_best(swarm);
  std::size_t best = i;
  for (std::size_t off = 0; off <= 2 * k; ++off) {
    const std::size_t j = (i + count - k + off) % count;
    const double fj = swarm[j].pbest_fitness;
    const double fb = swarm[best].pbest_fitness;
    if (fj > fb || (fj == fb && j < best)) best = j;
  }
  return best;
}

void record(FitnessTrace& trace, const std::vector<Particle>& swarm, double gbest) {
  double gap = 0.0;
  for (const auto& p : swarm) gap += gbest - p.pbest_fitness;
  trace.gbest.push_back(gbest);
  trace.mean_pbest_gap.push_back(gap / static_cast<double>(swarm.size()));
}

}  // namespace

PsoResult pso_train(const ObservationSequence& obs, std::size_t n, std::size_t m,
                    std::size_t d, const SwarmConfig& cfg, const PsoObserver& observer) {
  cfg.validate();
  const ParameterLayout layout{n, m, d};
  // Validates (d, m) against obs before any work is done.
  check_compatible(HmmModel(n, m, d), obs);

  const std::size_t count = cfg.particle_count;
  std::vector<Rng> streams;
  streams.reserve(count);
  std::vector<Particle> swarm(count);
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i < count; ++i) {
    streams.push_back(Rng::derived(cfg.seed, i));
    auto& p = swarm[i];
    p.position = encode(random_model(n, m, d, streams[i]));
    p.velocity.values.assign(layout.size(), 0.0);
    p.fitness = fitness(p.position, obs, n, m, d);
    ++evaluations;
    p.pbest_position = p.position;
    p.pbest_fitness = p.fitness;
  }

  PsoResult result;
  std::size_t best = swarm_best(swarm);
  result.gbest_position = swarm[best].pbest_position;
  result.gbest_fitness = swarm[best].pbest_fitness;
  record(result.trace, swarm, result.gbest_fitness);

  std::vector<Position> previous(count);
  for (std::size_t i = 0; i < count; ++i) previous[i] = swarm[i].position;
  if (observer) observer({0, swarm, previous, result.gbest_position, result.gbest_fitness});

  std::vector<std::size_t> attractor(count);
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    // Attractors come from the pbest snapshot at the start of the iteration,
    // so particle updates are independent of evaluation order.
    for (std::size_t i = 0; i < count; ++i) {
      attractor[i] = cfg.topology == Topology::global_best ? best
                                                           : ring_best(swarm, i, cfg.neighborhood_k);
    }
    std::vector<Position> guides(count);
    for (std::size_t i = 0; i < count; ++i) guides[i] = swarm[attractor[i]].pbest_position;

    for (std::size_t i = 0; i < count; ++i) {
      auto& p = swarm[i];
      auto& rng = streams[i];
      previous[i] = p.position;
      const Velocity v = velocity_update(p, guides[i], cfg, rng);
      const Position raw = position_update(p.position, v);
      const Position repaired = renormalize(remap_repair(raw, rng), layout);
      p.velocity = velocity_resync(p.position, repaired);
      // The realized position is old + resynced velocity, which is the
      // repaired point up to one rounding per coordinate.
      p.position = position_update(p.position, p.velocity);
      p.fitness = fitness(p.position, obs, n, m, d);
      ++evaluations;
      if (p.fitness > p.pbest_fitness) {
        p.pbest_fitness = p.fitness;
        p.pbest_position = p.position;
      }
    }

    best = swarm_best(swarm);
    if (swarm[best].pbest_fitness > result.gbest_fitness) {
      result.gbest_fitness = swarm[best].pbest_fitness;
      result.gbest_position = swarm[best].pbest_position;
    }
    record(result.trace, swarm, result.gbest_fitness);
    if (observer) observer({it, swarm, previous, result.gbest_position, result.gbest_fitness});
  }

  result.model = decode(result.gbest_position, n, m, d);
  result.evaluations = evaluations;
  return result;
}

}  // namespace psohmm
