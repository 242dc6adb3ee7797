#pragma once

#include <cstdint>
#include <string_view>

namespace terrastep {

/// Deterministic 64-bit generator (SplitMix64). Identical seeds produce
/// identical streams on every platform, unlike the std engines. The first
/// four outputs for seed 0 are frozen in the unit tests:
///   0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F, 0xF88BB8A8724C81EC
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Unbiased uniform integer in [0, n). Rejection sampling, n > 0.
    std::uint64_t next_below(std::uint64_t n);

    /// Standard normal via Box-Muller (not std::normal_distribution, whose
    /// stream is implementation-defined).
    double next_gaussian();

    /// Child seed for a named sub-stream: mixes the parent seed with an
    /// FNV-1a hash of the label and returns the first SplitMix64 output.
    static std::uint64_t child_seed(std::uint64_t parent, std::string_view label);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace terrastep
