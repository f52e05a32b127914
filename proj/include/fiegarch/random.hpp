#pragma once

#include <cstdint>
#include <random>

namespace fiegarch {

/// Every random stream in the library. The engine's output sequence is fixed
/// by the standard, and all variates below are derived from raw engine words,
/// so a seed reproduces the same numbers on every platform.
using Rng = std::mt19937_64;

/// Uniform draw on the open interval (0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw (Marsaglia polar method, second variate discarded).
double standard_normal(Rng& rng);

/// Gamma(shape, 1) draw via Marsaglia-Tsang squeeze/rejection. Shapes below
/// one are boosted: Gamma(a) = Gamma(a + 1) * U^(1/a).
double gamma_variate(double shape, Rng& rng);

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` under `base`: splitmix64 applied to the base
/// seed and then to the counter, so distinct (base, index) pairs give
/// unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ (0xD1B54A32D192ED03ULL * (index + 1)));
}

}  // namespace fiegarch
