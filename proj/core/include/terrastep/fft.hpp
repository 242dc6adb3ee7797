#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace terrastep {

/// Nine frequency bands over which DFT magnitudes are averaged. The ten
/// edges are strictly increasing, edges[0] > 0 (DC excluded) and edges[9]
/// must equal half the sampling rate of the series it is applied to.
struct SpectralBandSpec {
    static constexpr int kNumBands = 9;
    std::array<double, kNumBands + 1> edges{};

    /// Nine logarithmically spaced bands over (20 Hz, rate/2].
    static SpectralBandSpec log_bands(double rate_hz);

    /// Throws std::invalid_argument if the edges are not ascending/positive,
    /// or SchemaError if edges[9] does not match rate/2.
    void validate(double rate_hz) const;
};

SpectralBandSpec load_band_spec(const std::string& path);
void save_band_spec(const SpectralBandSpec& spec, const std::string& path);

namespace fft {

/// In-place iterative radix-2 transform. Size must be a power of two.
void transform(std::vector<std::complex<double>>& a);

/// Magnitude spectrum |DFT(x)| of the series zero-padded to the next power
/// of two. Output length equals the padded size.
std::vector<double> magnitude_spectrum(std::span<const double> x);

/// Mean magnitude per band; bin k of an N-point transform sits at frequency
/// k*rate/N and is counted in band j when edges[j] < f <= edges[j+1].
/// Bands that contain no bin are 0. Requires x.size() >= 2.
std::array<double, SpectralBandSpec::kNumBands> band_averages(std::span<const double> x,
                                                              double rate_hz,
                                                              const SpectralBandSpec& spec);

}  // namespace fft
}  // namespace terrastep
