#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace psohmm {

/// Seedable random source shared by every stochastic operation.
///
/// Backed by std::mt19937_64. Doubles are built from the top 53 bits of one
/// engine output, so a given seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream `stream` of master seed `seed` (one per particle).
  static Rng derived(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_positive() { return 1.0 - uniform(); }

  /// Index drawn proportionally to `weights` (non-negative, positive sum).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace psohmm
