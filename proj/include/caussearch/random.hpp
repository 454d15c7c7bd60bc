#pragma once

#include <cstdint>
#include <random>

namespace caussearch {

using Rng = std::mt19937_64;

/// Output `index` of a splitmix64 stream seeded with `seed`. Child seeds for
/// fold i depend only on (seed, i), so changing the number of folds never
/// reshuffles earlier ones.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace caussearch
