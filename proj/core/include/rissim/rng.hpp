#pragma once

#include <cstdint>
#include <random>

#include "rissim/common.hpp"

namespace rissim {

/// Derives an independent substream seed from (seed, stream) via a
/// splitmix64-style hash. Used so that parallelizable loops (dataset
/// generation, Monte-Carlo draws, per-CCTI solves) produce results that do
/// not depend on execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded random stream. All randomness in the project flows through this
/// type so runs are reproducible from a single master seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return unit_(eng_); }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal.
  double normal() { return normal_(eng_); }

  /// Circularly symmetric complex Gaussian, zero mean, unit total variance
  /// (real and imaginary parts each have variance 1/2).
  Complex cnormal();

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n);

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rissim
