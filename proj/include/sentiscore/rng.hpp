#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace sentiscore {

// std::mt19937_64 output is fully specified by the standard, but the
// std::*_distribution adaptors are not. Every sampling helper here is
// written out explicitly so that a seed pins the byte-exact result.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). n is tiny against 2^64, so the modulo bias is
// far below anything observable.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

inline double uniform_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_real01(rng);
}

// Fisher-Yates shuffle.
template <typename T>
void shuffle_in_place(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_index(rng, i)]);
  }
}

}  // namespace sentiscore
