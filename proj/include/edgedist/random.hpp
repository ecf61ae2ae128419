#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace edgedist {

/// Seeded random stream. Only the raw mt19937_64 output is used, so draws
/// are identical across standard libraries (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Uniform double in [0, 1).
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return p > 0.0 && uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent sub-seed from a master seed and a label, so that
/// per-item streams do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

}  // namespace edgedist
