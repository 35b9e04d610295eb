#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "psohmm/random.hpp"

namespace psohmm {

inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Raised when an observation sequence has probability zero under the model
/// and a posterior-based update is therefore undefined.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a parameter vector or model breaks the simplex constraints.
class ConstraintViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discrete HMM with `d` conditionally independent observation dimensions.
///
/// Storage is row-major and flat:
///   pi    : n
///   trans : n x n, trans[i*n + j] = P(q_{t+1} = j | q_t = i)
///   emit  : d x n x m, emit[(r*n + i)*m + k] = P(o_t^r = k | q_t = i)
struct HmmModel {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t d = 0;
  std::vector<double> pi;
  std::vector<double> trans;
  std::vector<double> emit;

  HmmModel() = default;
  /// Zero-filled model of the given shape.
  HmmModel(std::size_t hidden, std::size_t symbols, std::size_t dims);

  static HmmModel uniform(std::size_t hidden, std::size_t symbols, std::size_t dims);

  double& a(std::size_t i, std::size_t j) { return trans[i * n + j]; }
  double a(std::size_t i, std::size_t j) const { return trans[i * n + j]; }
  double& b(std::size_t r, std::size_t i, std::size_t k) { return emit[(r * n + i) * m + k]; }
  double b(std::size_t r, std::size_t i, std::size_t k) const { return emit[(r * n + i) * m + k]; }

  std::span<const double> trans_row(std::size_t i) const { return {trans.data() + i * n, n}; }
  std::span<const double> emit_row(std::size_t r, std::size_t i) const {
    return {emit.data() + (r * n + i) * m, m};
  }

  bool same_shape(const HmmModel& other) const {
    return n == other.n && m == other.m && d == other.d;
  }
  friend bool operator==(const HmmModel&, const HmmModel&) = default;
};

/// T steps of d symbol indices each, stored flat (step-major).
class ObservationSequence {
 public:
  ObservationSequence() = default;
  ObservationSequence(std::size_t dims, std::vector<std::uint32_t> symbols);
  /// One-dimensional convenience constructor.
  static ObservationSequence from_symbols(std::vector<std::uint32_t> symbols);

  std::size_t length() const { return dims_ == 0 ? 0 : symbols_.size() / dims_; }
  std::size_t dims() const { return dims_; }
  std::span<const std::uint32_t> step(std::size_t t) const {
    return {symbols_.data() + t * dims_, dims_};
  }
  const std::vector<std::uint32_t>& symbols() const { return symbols_; }
  std::uint32_t max_symbol() const;

  friend bool operator==(const ObservationSequence&, const ObservationSequence&) = default;

 private:
  std::size_t dims_ = 0;
  std::vector<std::uint32_t> symbols_;
};

struct Violation {
  std::string where;    // e.g. "trans[1]" or "emit[0][1][3]"
  std::string what;     // "negative" | "out of range" | "row sum"
  double deviation = 0;  // distance outside [0,1], or |sum - 1|
};

/// One entry per broken constraint; empty iff the model is valid.
std::vector<Violation> validate_model(const HmmModel& model);
bool is_valid(const HmmModel& model);
/// Throws ConstraintViolationError describing the first violation.
void require_valid(const HmmModel& model);

HmmModel random_model(std::size_t n, std::size_t m, std::size_t d, Rng& rng);

ObservationSequence sample_sequence(const HmmModel& model, std::size_t length, Rng& rng);

/// Throws std::invalid_argument when obs does not fit the model's (d, m).
void check_compatible(const HmmModel& model, const ObservationSequence& obs);

/// Product over dimensions of the emission entries for step t in state i.
double emission_probability(const HmmModel& model, const ObservationSequence& obs,
                            std::size_t t, std::size_t i);

/// log P(O | model) by the scaled forward recursion. -inf when every path
/// has zero probability.
double forward_log_likelihood(const HmmModel& model, const ObservationSequence& obs);

inline constexpr std::size_t kMaxEnumeratedPaths = 1'000'000;

/// log P(O | model) by summing the joint probability of every hidden path.
/// Exponential; intended as a reference for small instances only.
double brute_force_log_likelihood(const HmmModel& model, const ObservationSequence& obs);

/// log P(O, Q | model) for one explicit hidden path.
double path_log_probability(const HmmModel& model, const ObservationSequence& obs,
                            std::span<const std::size_t> path);

struct ViterbiResult {
  std::vector<std::size_t> path;
  double log_probability = kNegInf;
};

/// Most probable hidden path. Ties resolve to the lower state index.
ViterbiResult viterbi_decode(const HmmModel& model, const ObservationSequence& obs);

/// One EM re-estimation from scaled forward-backward posteriors.
/// Rows whose expected count is zero are reset to uniform.
/// Throws DegenerateInputError if obs has probability zero.
HmmModel baum_welch_step(const HmmModel& model, const ObservationSequence& obs);

struct BaumWelchResult {
  HmmModel model;
  std::vector<double> trace;  // iterations + 1 entries, initial first
};

BaumWelchResult baum_welch_train(const HmmModel& model, const ObservationSequence& obs,
                                 std::size_t iterations);

}  // namespace psohmm
