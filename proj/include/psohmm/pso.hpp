#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "psohmm/hmm.hpp"
#include "psohmm/random.hpp"

namespace psohmm {

inline constexpr double kLowerBound = 0.0;
inline constexpr double kUpperBound = 1.0;
/// Re-mapping applications per entry before falling back to clamping.
inline constexpr int kMaxRemapRounds = 100;

/// Flattened parameter layout: [pi | trans rows | emit rows of dim 0 | ... ].
/// Every contiguous row is one probability simplex.
struct ParameterLayout {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t d = 0;

  struct Row {
    std::size_t offset;
    std::size_t length;
  };

  std::size_t size() const { return n + n * n + d * n * m; }
  std::size_t trans_offset() const { return n; }
  std::size_t emit_offset() const { return n + n * n; }
  /// pi, then n transition rows, then d*n emission rows.
  std::vector<Row> rows() const;
};

struct Position {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
  friend bool operator==(const Position&, const Position&) = default;
};

struct Velocity {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
  friend bool operator==(const Velocity&, const Velocity&) = default;
};

struct Particle {
  Position position;
  Velocity velocity;
  double fitness = kNegInf;  // fitness of `position`
  Position pbest_position;
  double pbest_fitness = kNegInf;
};

enum class Topology { global_best, ring };

std::string to_string(Topology topology);
Topology topology_from_string(const std::string& name);

struct SwarmConfig {
  std::size_t particle_count = 25;
  std::size_t iterations = 10;
  double omega = 0.729;
  double c1 = 1.49445;
  double c2 = 1.49445;
  Topology topology = Topology::global_best;
  std::size_t neighborhood_k = 2;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct FitnessTrace {
  std::vector<double> gbest;            // swarm-best log-likelihood per iteration
  std::vector<double> mean_pbest_gap;   // mean (gbest - pbest_i) per iteration
};

Position encode(const HmmModel& model);

/// Throws std::invalid_argument on a length mismatch and
/// ConstraintViolationError when the position is not repaired.
HmmModel decode(const Position& position, std::size_t n, std::size_t m, std::size_t d);

/// v = omega*v + c1*xi1*(pbest - x) + c2*xi2*(gbest - x), with an independent
/// uniform [0,1) draw per component for each of xi1 and xi2.
Velocity velocity_update(const Particle& particle, const Position& gbest,
                         const SwarmConfig& cfg, Rng& rng);
/// Same update with caller-supplied xi1/xi2 vectors.
Velocity velocity_update(const Particle& particle, const Position& gbest,
                         const SwarmConfig& cfg, std::span<const double> xi1,
                         std::span<const double> xi2);

Position position_update(const Position& position, const Velocity& velocity);

/// One re-mapping application with a given xi.
double remap_value(double psi, double xi);
/// Re-map until psi lies in [0, 1], drawing a fresh xi per application.
double remap_entry(double psi, Rng& rng);
Position remap_repair(const Position& raw, Rng& rng);

/// Scale each simplex row to sum to one; all-zero rows become uniform.
Position renormalize(const Position& position, const ParameterLayout& layout);

/// Realized displacement: repaired - old.
Velocity velocity_resync(const Position& old_position, const Position& repaired_position);

/// log P(O | decode(position)).
double fitness(const Position& position, const ObservationSequence& obs, std::size_t n,
               std::size_t m, std::size_t d);

/// Swarm state after each iteration (iteration 0 is the initial swarm, for
/// which previous_positions equals the current positions).
struct IterationView {
  std::size_t iteration;
  std::span<const Particle> particles;
  std::span<const Position> previous_positions;
  const Position& gbest_position;
  double gbest_fitness;
};
using PsoObserver = std::function<void(const IterationView&)>;

struct PsoResult {
  HmmModel model;
  Position gbest_position;
  double gbest_fitness = kNegInf;
  FitnessTrace trace;
  std::size_t evaluations = 0;
};

PsoResult pso_train(const ObservationSequence& obs, std::size_t n, std::size_t m,
                    std::size_t d, const SwarmConfig& cfg, const PsoObserver& observer = {});

}  // namespace psohmm
