#pragma once

#include "kscc/common.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace kscc {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent sub-stream seed from a base seed and up to three
/// stream ids. Used to keep parallel work deterministic: every consumer gets
/// its own seed computed from its logical position, never from scheduling.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(a));
  s = splitmix64(s ^ splitmix64(b ^ 0x632be59bd9b4e019ULL));
  s = splitmix64(s ^ splitmix64(c ^ 0x9e6c63d0a0f3eb12ULL));
  return s;
}

/// Seeded random stream with portable output. The standard distributions are
/// implementation-defined, so uniforms and normals are mapped from raw
/// mt19937_64 words here; the same seed yields the same values on any
/// conforming stdlib.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw InputError("uniform_index: empty range");
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller; one variate per call.
  double normal() {
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// k distinct draws from `pool` by partial Fisher-Yates on a local copy.
  std::vector<Index> sample_distinct(std::span<const Index> pool,
                                     std::size_t k) {
    if (k > pool.size())
      throw InputError("sample_distinct: k exceeds pool size");
    std::vector<Index> scratch(pool.begin(), pool.end());
    std::vector<Index> out(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(uniform_index(scratch.size() - i));
      std::swap(scratch[i], scratch[j]);
      out[i] = scratch[i];
    }
    return out;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace kscc
