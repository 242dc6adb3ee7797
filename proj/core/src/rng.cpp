#include "terrastep/rng.hpp"

#include <cmath>
#include <numbers>

namespace terrastep {

std::uint64_t Rng::next_below(std::uint64_t n) {
    // classic rejection: discard the biased tail of the 2^64 range
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

double Rng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u clamped away from 0 so log stays finite
    double u = next_double();
    if (u < 1e-300) u = 1e-300;
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::child_seed(std::uint64_t parent, std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    Rng mix(parent ^ h);
    return mix.next_u64();
}

}  // namespace terrastep
