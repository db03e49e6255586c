#pragma once

#include <cstdint>
#include <random>

namespace recmax {

/// Uniform draw from the open interval (0, 1): 53 random bits centered in
/// their bin, so 0 and 1 are never returned and ln(u), ln(-ln(u)) are safe.
inline double uniform_open01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Stream seed for path index `path` under a master seed: a splitmix64 step,
/// so any path of any run is reproducible regardless of thread scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t path) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (path + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t path) {
    return std::mt19937_64(derive_stream_seed(seed, path));
}

}  // namespace recmax
