#pragma once

#include <cstdint>
#include <random>

namespace aifpong {

// One generator per trial worker. All sampling goes through the helpers below
// so that results depend only on the seed and the call sequence, not on
// standard-library distribution internals.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline int uniform_int(Rng& rng, int n) {
  int v = static_cast<int>(uniform01(rng) * n);
  return v < n ? v : n - 1;
}

}  // namespace aifpong
