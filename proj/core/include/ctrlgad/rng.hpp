#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ctrlgad/errors.hpp"

namespace ctrlgad {

/// Deterministic random source. The raw stream comes from mt19937_64, but all
/// distribution transforms are implemented here so that a given seed yields
/// identical draws on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    if (!(lo <= hi)) throw PreconditionError("uniform: lo > hi");
    return lo + (hi - lo) * uniform();
  }

  /// Uniform integer in [lo, hi], both ends inclusive. Rejection sampling
  /// keeps the draw unbiased for any range width.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw PreconditionError("uniform_int: lo > hi");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo);
    if (span == UINT64_MAX) return static_cast<std::int64_t>(engine_());
    const std::uint64_t buckets = span + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % buckets;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return lo + static_cast<std::int64_t>(draw % buckets);
  }

  bool bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw PreconditionError("bernoulli: p outside [0, 1]");
    return uniform() < p;
  }

  /// Standard normal via Box-Muller; the second draw of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Fisher-Yates shuffle, iterating from the back.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(
          uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(items[i], items[j]);
    }
  }

  /// k distinct values sampled from [0, n) by partial Fisher-Yates.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    if (k > n) throw PreconditionError("sample_indices: k > n");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(uniform_int(
          static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ctrlgad
