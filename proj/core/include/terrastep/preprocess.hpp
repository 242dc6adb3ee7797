#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "terrastep/types.hpp"

namespace terrastep {

/// Least-squares line removal: returns x - (a + b*i) where (a, b) minimize
/// the squared error over sample indices i. Requires N >= 2.
std::vector<double> detrend(std::span<const double> x);

inline SampleSeries detrend(const SampleSeries& s) {
    return {detrend(std::span<const double>(s.values)), s.rate_hz};
}

/// Elementwise sum of the 8 detrended tactile channels, at the slow rate.
SampleSeries sum_tactile(const RecordingRun& run);

struct SegmentationParams {
    /// Contact threshold as a fraction of the summed-tactile peak-to-peak.
    double contact_threshold_frac = 0.3;
    /// Contacts whose peaks are closer than this are merged into one step.
    double min_step_gap_s = 0.5;
    /// Contacts shorter than this are discarded.
    double min_contact_s = 0.2;

    void validate() const;
};

/// One footstep's slice of both streams. Index ranges are half-open into the
/// source run; the tactile slices are copies of the detrended channels over
/// the segment window.
struct FootstepSegment {
    double t_start = 0.0;
    double t_end = 0.0;
    double t_peak = 0.0;  // position of the summed-tactile maximum
    std::size_t slow_begin = 0, slow_end = 0;
    std::size_t fast_begin = 0, fast_end = 0;
    std::array<std::vector<double>, kTactileChannels> tactile;
    std::vector<double> tactile_sum;
};

/// Detrends the tactile channels over the full run, thresholds the summed
/// series at min + frac*(max-min), and turns threshold crossings into
/// contact segments: start = last upward crossing before a summed-tactile
/// maximum, end = next downward crossing. Contacts with peaks closer than
/// min_step_gap_s are merged; contacts shorter than min_contact_s dropped.
/// A flat run (zero peak-to-peak) yields an empty list. Throws
/// std::invalid_argument when the run is shorter than min_contact_s.
std::vector<FootstepSegment> segment(const RecordingRun& run, const SegmentationParams& params);

}  // namespace terrastep
