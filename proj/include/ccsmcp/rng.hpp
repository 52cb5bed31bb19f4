#pragma once

// Deterministic pseudo-random streams. Substreams are derived by mixing a
// 64-bit seed with a stream index, so per-row / per-cell draws stay
// reproducible regardless of evaluation order.

#include <cstdint>
#include <random>

namespace ccsmcp {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  /// Substream for (seed, index) pairs, e.g. one per instance row.
  static RngStream derive(std::uint64_t seed, std::uint64_t index) {
    return RngStream(detail::splitmix64(detail::splitmix64(seed) ^ index));
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1); bit-identical across platforms (mt19937_64 is
  /// fully specified, unlike the standard distributions).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] by rejection.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = std::uint64_t(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return lo + int(v % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ccsmcp
