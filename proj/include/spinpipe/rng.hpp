#pragma once
// Counter-based deterministic random numbers. A draw is a pure function of
// (key, counter), so streams are reproducible bit-for-bit for a given
// configuration and seed regardless of evaluation order or threading.

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "spinpipe/constants.hpp"

namespace spinpipe {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Fold a seed and a list of stream indices into one stream key.
inline std::uint64_t mix_key(std::uint64_t seed, std::initializer_list<std::uint64_t> indices) {
    std::uint64_t k = splitmix64(seed);
    for (std::uint64_t v : indices) k = splitmix64(k ^ (v + 0x9e3779b97f4a7c15ull));
    return k;
}

struct CounterRng {
    std::uint64_t key = 0;
    std::uint64_t ctr = 0;

    // Uniform on the open interval (0, 1).
    double uniform() {
        const std::uint64_t bits = splitmix64(key ^ splitmix64(ctr++));
        return double(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    // Standard normal (Box-Muller, cosine branch).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    // Normal with standard deviation sigma, clamped at +-cap sigmas.
    // Increments *truncations when the clamp fires.
    double normal_clamped(double sigma, double cap = 6.0, long long* truncations = nullptr) {
        double z = normal();
        if (std::abs(z) > cap) {
            if (truncations) ++*truncations;
            z = std::copysign(cap, z);
        }
        return sigma * z;
    }
};

}  // namespace spinpipe
