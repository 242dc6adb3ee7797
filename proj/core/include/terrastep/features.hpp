#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "terrastep/fft.hpp"
#include "terrastep/preprocess.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

// Frozen feature layout. 100 features per footstep:
//   [ 0..17]  accelerometer: {max,min,mean,variance,sum,zcr} for x, y, z
//   [18..27]  acoustic: zcr + 9 spectral band averages
//   [28..38]  capacitive: mean, variance + 9 spectral band averages
//   [39..97]  tactile: summed-series max/min/rise80 (3),
//             per channel {max,min,mean,variance,skewness,kurtosis} (48),
//             per channel value at the summed series' rise80 index (8)
//   [98..99]  temperature: mean, variance
inline constexpr std::size_t kAccelBegin = 0;
inline constexpr std::size_t kAcousticBegin = 18;
inline constexpr std::size_t kCapacitiveBegin = 28;
inline constexpr std::size_t kTactileBegin = 39;
inline constexpr std::size_t kTemperatureBegin = 98;

/// The frozen index -> name table. Reordering it breaks every serialized
/// dataset and model, so its hash is pinned in the tests.
const std::array<std::string, kFeatureCount>& feature_names();

/// FNV-1a over the names joined with '\n'; stable schema fingerprint.
std::uint64_t feature_schema_hash();

/// Channel views for one footstep, decoupled from RecordingRun so the
/// streaming pipeline can extract from its own buffers. Tactile series are
/// detrended; all spans must outlive the call.
struct SegmentWindow {
    std::span<const double> accel_x, accel_y, accel_z;
    std::span<const double> temperature;
    std::span<const double> acoustic, capacitive;
    std::array<std::span<const double>, kTactileChannels> tactile;
    std::span<const double> tactile_sum;
    double fast_rate_hz = 18000.0;
};

/// Assembles the 100-feature vector for one footstep. Requires >= 2 samples
/// in each stream and a positive summed-tactile maximum (no-contact segments
/// are rejected). The result carries no label.
FeatureVector extract_features(const SegmentWindow& win, const SpectralBandSpec& bands);

/// Offline variant: slices the run at the segment's index ranges.
FeatureVector extract_features(const RecordingRun& run, const FootstepSegment& seg,
                               const SpectralBandSpec& bands);

}  // namespace terrastep
