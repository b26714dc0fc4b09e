// rng.hpp — Deterministic, splittable random number generation.
//
// Every stochastic quantity in the library is a pure function of an explicit
// 64-bit seed. Streams are derived from a master seed with mix_seed(), so an
// ensemble of realizations gives identical results regardless of how the work
// is scheduled across threads.
//
// The uniform engine is std::mt19937_64 (fully specified by the standard) and
// normals come from an explicit Box–Muller transform rather than
// std::normal_distribution, whose output is implementation-defined.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace bandspin {

// SplitMix64 finalizer. Stream k of a master seed is
// mix_seed(master_seed, k); distinct streams are statistically independent.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Uniform double in (0, 1], using the top 53 bits of the engine output.
inline double uniform_unit(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal via Box–Muller (one deviate per call; no cached spare, so
// the draw order is a trivial function of the call sequence).
inline double standard_normal(std::mt19937_64& gen) {
    const double u1 = uniform_unit(gen);
    const double u2 = uniform_unit(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Complex Gaussian with independent N(0, 1/2) quadratures, so <|c|^2> = 1 and
// <c^2> = 0. Real part is drawn first.
inline std::complex<double> complex_gaussian(std::mt19937_64& gen) {
    const double re = standard_normal(gen);
    const double im = standard_normal(gen);
    return {re * M_SQRT1_2, im * M_SQRT1_2};
}

} // namespace bandspin
