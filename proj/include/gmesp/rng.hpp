#pragma once

#include <cstdint>
#include <random>

namespace gmesp {

// Draws mapped straight from mt19937_64 output words. The standard pins the
// engine's bit stream but not the library distributions, so these keep
// generated data byte-identical across toolchains.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_pm1(std::mt19937_64& rng) { return 2.0 * uniform01(rng) - 1.0; }

// Unbiased integer in [0, hi] via rejection.
inline std::uint64_t bounded_int(std::mt19937_64& rng, std::uint64_t hi) {
    const std::uint64_t span = hi + 1;
    const std::uint64_t limit = span * (UINT64_MAX / span);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % span;
}

}  // namespace gmesp
