#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace semdrift {

// std::mt19937_64 output is fixed by the standard, but the std distributions
// are not. These helpers are defined in terms of raw engine output so seeded
// results are identical across standard libraries.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Standard normal via Box-Muller; consumes exactly two engine draws.
inline double standard_normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// In-place Fisher-Yates over the first k slots: after the call, v[0..k) is a
// uniform sample without replacement of v, in draw order.
template <typename T>
void partial_shuffle(std::vector<T>& v, std::size_t k, Rng& rng) {
  const std::size_t n = v.size();
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_below(rng, n - i);
    using std::swap;
    swap(v[i], v[j]);
  }
}

}  // namespace semdrift
