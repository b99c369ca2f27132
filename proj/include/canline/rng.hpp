#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace canline {

/// Seeded random stream used by every stochastic component.
///
/// Draw algorithms are implemented here instead of <random> distributions:
/// the standard specifies mt19937_64 bit-exactly but leaves distribution
/// output implementation-defined, and runs must replay byte-identically
/// from a seed on any toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived from (seed, stream_id); lets per-item work
  /// (e.g. one can) be generated out of order or in parallel.
  [[nodiscard]] static Rng substream(std::uint64_t seed,
                                     std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Unbiased uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// True with probability p (clamped to [0, 1]).
  bool bernoulli(double p);

  /// Gaussian via Box-Muller. stddev 0 returns mean exactly.
  double normal(double mean, double stddev);

  /// Knuth's product method; suitable for the small means used here.
  std::uint64_t poisson(double mean);

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace canline
