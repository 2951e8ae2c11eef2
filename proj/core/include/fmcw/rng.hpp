#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fmcw {

/// Deterministic generator used for every stochastic draw in the library.
///
/// Engine: std::mt19937_64 (fully specified by the standard). Uniforms take
/// the top 53 bits; normals use the Box-Muller transform. Nothing here relies
/// on implementation-defined std distributions, so a seed reproduces the same
/// stream on any conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal.
    double normal();

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer; used to derive independent per-task seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) noexcept {
    return mix_seed(mix_seed(mix_seed(mix_seed(base) ^ a) ^ b) ^ c);
}

}  // namespace fmcw
