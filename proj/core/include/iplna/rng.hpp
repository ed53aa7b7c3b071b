#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace iplna::rng {

// std::mt19937_64 is fully specified by the standard, so seeded streams are
// identical across platforms. Distributions from <random> are not; the
// mappings below are, which keeps generated data bit-reproducible.

// Uniform on [0, 1) with 53-bit resolution.
inline double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform on [-1, 1).
inline double symmetric_uniform(std::mt19937_64& gen) {
    return 2.0 * unit_uniform(gen) - 1.0;
}

// Uniform on [-amp, amp).
inline double uniform(std::mt19937_64& gen, double amp) {
    return amp * symmetric_uniform(gen);
}

// Standard normal via Box-Muller; consumes exactly two draws.
inline double gaussian(std::mt19937_64& gen) {
    const double u1 = 1.0 - unit_uniform(gen);  // (0, 1], keeps log() finite
    const double u2 = unit_uniform(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace iplna::rng
