#pragma once

#include "symcover/common.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace symcover {

/// SplitMix64 finalizer; used to turn (master seed, stream index) into
/// well-separated engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the `stream`-th child of `master`. Children of children are
/// obtained by applying this again, so task trees stay reproducible no matter
/// how work is scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next_u64() { return engine_(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * n) % n; }

  double normal() { return normal_(engine_); }
  /// Exp(1).
  double exponential() { return -std::log1p(-uniform()); }
  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }

  /// Uniform direction on the Euclidean unit sphere.
  Vec unit_vector(int n);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace symcover
