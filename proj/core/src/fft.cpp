#include "terrastep/fft.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

SpectralBandSpec SpectralBandSpec::log_bands(double rate_hz) {
    if (rate_hz <= 40.0) throw std::invalid_argument("log_bands: rate too low for a 20 Hz floor");
    SpectralBandSpec spec;
    const double lo = 20.0, hi = rate_hz / 2.0;
    const double ratio = hi / lo;
    for (int i = 0; i <= kNumBands; ++i)
        spec.edges[i] = lo * std::pow(ratio, static_cast<double>(i) / kNumBands);
    spec.edges[0] = lo;
    spec.edges[kNumBands] = hi;  // exact endpoints, no pow round-off
    return spec;
}

void SpectralBandSpec::validate(double rate_hz) const {
    if (!(edges[0] > 0.0)) throw std::invalid_argument("band edges must start above DC");
    for (int i = 1; i <= kNumBands; ++i)
        if (!(edges[i] > edges[i - 1]))
            throw std::invalid_argument("band edges must be strictly increasing");
    const double nyquist = rate_hz / 2.0;
    if (std::abs(edges[kNumBands] - nyquist) > 1e-9 * nyquist)
        throw SchemaError("band spec top edge " + std::to_string(edges[kNumBands]) +
                          " does not match Nyquist " + std::to_string(nyquist));
}

SpectralBandSpec load_band_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open band spec: " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("edges_hz") || !j["edges_hz"].is_array() ||
        j["edges_hz"].size() != SpectralBandSpec::kNumBands + 1)
        throw SchemaError("band spec needs an edges_hz array of 10 values: " + path);
    SpectralBandSpec spec;
    for (int i = 0; i <= SpectralBandSpec::kNumBands; ++i) spec.edges[i] = j["edges_hz"][i].get<double>();
    return spec;
}

void save_band_spec(const SpectralBandSpec& spec, const std::string& path) {
    nlohmann::json j;
    j["edges_hz"] = spec.edges;
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write band spec: " + path);
    out << j.dump(2) << '\n';
}

namespace fft {

void transform(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::vector<double> magnitude_spectrum(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("magnitude_spectrum: need at least 2 samples");
    std::size_t n = 1;
    while (n < x.size()) n <<= 1;
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = {x[i], 0.0};
    transform(buf);
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(buf[i]);
    return mag;
}

std::array<double, SpectralBandSpec::kNumBands> band_averages(std::span<const double> x,
                                                              double rate_hz,
                                                              const SpectralBandSpec& spec) {
    spec.validate(rate_hz);
    const std::vector<double> mag = magnitude_spectrum(x);
    const std::size_t n = mag.size();
    std::array<double, SpectralBandSpec::kNumBands> acc{};
    std::array<std::size_t, SpectralBandSpec::kNumBands> count{};
    // only bins up to Nyquist carry distinct frequencies
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * rate_hz / static_cast<double>(n);
        for (int b = 0; b < SpectralBandSpec::kNumBands; ++b) {
            if (f > spec.edges[b] && f <= spec.edges[b + 1]) {
                acc[b] += mag[k];
                ++count[b];
                break;
            }
        }
    }
    for (int b = 0; b < SpectralBandSpec::kNumBands; ++b)
        if (count[b] > 0) acc[b] /= static_cast<double>(count[b]);
    return acc;
}

}  // namespace fft
}  // namespace terrastep
