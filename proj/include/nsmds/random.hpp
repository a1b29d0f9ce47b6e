#pragma once

// Counter-based randomness. Every draw is a pure function of a 64-bit seed and
// integer coordinates, so results do not depend on thread scheduling.
//
// Algorithm: SplitMix64 finalizer (Steele, Lea, Flood 2014) chained over the
// key words; uniforms take the top 53 bits; normals use Box-Muller on two
// uniforms drawn from consecutive counters.

#include <cstdint>

namespace nsmds {

/// SplitMix64 output function applied to x.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

/// Hash of (seed, a, b), used to derive independent sub-streams.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Uniform in the open interval (0, 1).
[[nodiscard]] double uniform_from_bits(std::uint64_t bits);

/// Standard normal value determined by (seed, a, b).
[[nodiscard]] double counter_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Sequential generator over a counter: draw t is a function of (seed, t).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace nsmds
