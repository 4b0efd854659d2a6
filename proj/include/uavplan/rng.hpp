#pragma once

#include <cstdint>
#include <random>

namespace uavplan {

using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a stream index
// (splitmix64 finalizer), so per-individual / per-particle streams stay
// decorrelated and reproducible.
inline std::uint64_t sub_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t v = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    v ^= v >> 30;
    v *= 0xbf58476d1ce4e5b9ULL;
    v ^= v >> 27;
    v *= 0x94d049bb133111ebULL;
    v ^= v >> 31;
    return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double unit_uniform(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t count) {
    return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
}

}  // namespace uavplan
