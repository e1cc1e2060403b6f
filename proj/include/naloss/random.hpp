#pragma once

#include <cstdint>
#include <random>

namespace naloss {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits. Unlike
/// std::uniform_real_distribution the result is identical on every standard
/// library, which keeps seeded runs byte-reproducible.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

} // namespace naloss
