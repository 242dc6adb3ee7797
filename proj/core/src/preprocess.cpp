#include "terrastep/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace terrastep {

std::vector<double> detrend(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("detrend: need at least 2 samples");

    // least squares over sample indices, centered for stability
    const double ibar = 0.5 * static_cast<double>(n - 1);
    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double di = static_cast<double>(i) - ibar;
        sxy += di * (x[i] - xbar);
        sxx += di * di;
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] - (xbar + slope * (static_cast<double>(i) - ibar));
    return out;
}

void SegmentationParams::validate() const {
    if (!(contact_threshold_frac > 0.0 && contact_threshold_frac < 1.0))
        throw std::invalid_argument("contact_threshold_frac must be in (0,1)");
    if (!(min_step_gap_s > 0.0)) throw std::invalid_argument("min_step_gap_s must be positive");
    if (!(min_contact_s > 0.0)) throw std::invalid_argument("min_contact_s must be positive");
}

SampleSeries sum_tactile(const RecordingRun& run) {
    const std::size_t n = run.slow.size();
    SampleSeries out;
    out.rate_hz = run.slow.rate_hz;
    out.values.assign(n, 0.0);
    if (n < 2) return out;
    for (const auto& channel : run.slow.tactile) {
        const std::vector<double> flat = detrend(channel);
        for (std::size_t i = 0; i < n; ++i) out.values[i] += flat[i];
    }
    return out;
}

namespace {

struct Interval {
    std::size_t up = 0, down = 0;  // down = first sample back below threshold
    std::size_t peak = 0;
};

std::vector<Interval> threshold_intervals(const std::vector<double>& s, double thr) {
    std::vector<Interval> out;
    bool above = false;
    Interval cur;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!above && s[i] >= thr) {
            above = true;
            cur = Interval{i, i, i};
        } else if (above) {
            if (s[i] > s[cur.peak]) cur.peak = i;
            if (s[i] < thr) {
                cur.down = i;
                out.push_back(cur);
                above = false;
            }
        }
    }
    if (above) {  // stream ends mid-contact
        cur.down = s.size() - 1;
        out.push_back(cur);
    }
    return out;
}

}  // namespace

std::vector<FootstepSegment> segment(const RecordingRun& run, const SegmentationParams& params) {
    params.validate();
    const std::size_t n = run.slow.size();
    if (n < 2 || (run.slow.t.back() - run.slow.t.front()) <= params.min_contact_s)
        throw std::invalid_argument("segment: run shorter than min_contact_s");

    std::array<std::vector<double>, kTactileChannels> flat;
    for (int c = 0; c < kTactileChannels; ++c) flat[c] = detrend(run.slow.tactile[c]);
    std::vector<double> sum(n, 0.0);
    for (int c = 0; c < kTactileChannels; ++c)
        for (std::size_t i = 0; i < n; ++i) sum[i] += flat[c][i];

    const double lo = *std::min_element(sum.begin(), sum.end());
    const double hi = *std::max_element(sum.begin(), sum.end());
    const double p2p = hi - lo;
    if (p2p <= 0.0) return {};  // flat run, nothing to find
    const double thr = lo + params.contact_threshold_frac * p2p;

    std::vector<Interval> intervals = threshold_intervals(sum, thr);

    // contacts whose maxima are closer than min_step_gap_s belong to one step
    std::vector<Interval> merged;
    for (const Interval& iv : intervals) {
        if (!merged.empty()) {
            Interval& prev = merged.back();
            const double gap = run.slow.t[iv.peak] - run.slow.t[prev.peak];
            if (gap < params.min_step_gap_s) {
                prev.down = iv.down;
                if (sum[iv.peak] > sum[prev.peak]) prev.peak = iv.peak;
                continue;
            }
        }
        merged.push_back(iv);
    }

    std::vector<FootstepSegment> segments;
    for (const Interval& iv : merged) {
        const double t0 = run.slow.t[iv.up];
        const double t1 = run.slow.t[iv.down];
        if (t1 - t0 < params.min_contact_s) continue;

        FootstepSegment seg;
        seg.t_start = t0;
        seg.t_end = t1;
        seg.t_peak = run.slow.t[iv.peak];
        seg.slow_begin = iv.up;
        seg.slow_end = iv.down + 1;
        const auto fb = std::lower_bound(run.fast.t.begin(), run.fast.t.end(), t0);
        const auto fe = std::upper_bound(run.fast.t.begin(), run.fast.t.end(), t1);
        seg.fast_begin = static_cast<std::size_t>(fb - run.fast.t.begin());
        seg.fast_end = static_cast<std::size_t>(fe - run.fast.t.begin());
        for (int c = 0; c < kTactileChannels; ++c)
            seg.tactile[c].assign(flat[c].begin() + static_cast<long>(seg.slow_begin),
                                  flat[c].begin() + static_cast<long>(seg.slow_end));
        seg.tactile_sum.assign(sum.begin() + static_cast<long>(seg.slow_begin),
                               sum.begin() + static_cast<long>(seg.slow_end));
        segments.push_back(std::move(seg));
    }
    return segments;
}

}  // namespace terrastep
