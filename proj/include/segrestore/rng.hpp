#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace segrestore::rng {

using Engine = std::mt19937_64;

/// Derives an independent stream seed from a top-level seed and a salt
/// (splitmix64 finalizer), so one --seed flag can drive several generators.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) with 53 bits of precision. The engine-to-double
/// mapping is fixed here; std::uniform_real_distribution is not portable.
inline double unit_uniform(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi]; a point interval [x, x] always yields x.
inline double uniform_in(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(eng);
}

/// Unbiased uniform integer in [0, n), n >= 1. Rejection sampling.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
  assert(n > 0);
  const std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
  std::uint64_t x = eng();
  while (x < reject_below) {
    x = eng();
  }
  return x % n;
}

/// Standard normal draw via Box-Muller; consumes exactly two engine outputs.
inline double gaussian(Engine& eng) {
  const double u1 = 1.0 - unit_uniform(eng);  // (0, 1], keeps log() finite
  const double u2 = unit_uniform(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Seeded Fisher-Yates pass. std::shuffle is implementation-defined, so it
/// cannot back a byte-reproducibility contract.
template <typename T>
void shuffle(std::vector<T>& items, Engine& eng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(eng, i)]);
  }
}

}  // namespace segrestore::rng
