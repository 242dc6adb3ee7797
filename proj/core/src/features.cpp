#include "terrastep/features.hpp"

#include <cmath>
#include <stdexcept>

#include "terrastep/stats.hpp"

namespace terrastep {

namespace {

std::array<std::string, kFeatureCount> build_names() {
    std::array<std::string, kFeatureCount> names;
    std::size_t i = 0;
    const char* axes[] = {"x", "y", "z"};
    const char* base_stats[] = {"max", "min", "mean", "variance", "sum", "zcr"};
    for (const char* axis : axes)
        for (const char* st : base_stats) names[i++] = std::string("accel_") + axis + "_" + st;

    names[i++] = "acoustic_zcr";
    for (int b = 0; b < 9; ++b) names[i++] = "acoustic_band_" + std::to_string(b);

    names[i++] = "cap_mean";
    names[i++] = "cap_variance";
    for (int b = 0; b < 9; ++b) names[i++] = "cap_band_" + std::to_string(b);

    names[i++] = "tactile_sum_max";
    names[i++] = "tactile_sum_min";
    names[i++] = "tactile_sum_rise80";
    const char* tac_stats[] = {"max", "min", "mean", "variance", "skewness", "kurtosis"};
    for (int c = 0; c < kTactileChannels; ++c)
        for (const char* st : tac_stats)
            names[i++] = "tactile_ch" + std::to_string(c) + "_" + st;
    for (int c = 0; c < kTactileChannels; ++c)
        names[i++] = "tactile_ch" + std::to_string(c) + "_at_rise80";

    names[i++] = "temp_mean";
    names[i++] = "temp_variance";
    return names;
}

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = build_names();
    return names;
}

std::uint64_t feature_schema_hash() {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](char c) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    };
    for (const std::string& name : feature_names()) {
        for (char c : name) mix(c);
        mix('\n');
    }
    return h;
}

FeatureVector extract_features(const SegmentWindow& win, const SpectralBandSpec& bands) {
    if (win.accel_x.size() < 2 || win.acoustic.size() < 2 || win.capacitive.size() < 2 ||
        win.temperature.size() < 2 || win.tactile_sum.size() < 2)
        throw std::invalid_argument("extract_features: segment needs at least 2 samples per stream");
    for (const auto& ch : win.tactile)
        if (ch.size() != win.tactile_sum.size())
            throw std::invalid_argument("extract_features: tactile channel/sum length mismatch");
    if (!(stats::maximum(win.tactile_sum) > 0.0))
        throw std::invalid_argument("extract_features: summed tactile has non-positive maximum (no contact)");

    FeatureVector fv;
    std::size_t i = 0;
    auto put = [&](double v) { fv.values[i++] = v; };

    for (const auto& axis : {win.accel_x, win.accel_y, win.accel_z}) {
        put(stats::maximum(axis));
        put(stats::minimum(axis));
        put(stats::mean(axis));
        put(stats::variance(axis));
        put(stats::sum(axis));
        put(stats::zero_crossing_rate(axis));
    }

    put(stats::zero_crossing_rate(win.acoustic));
    for (double v : fft::band_averages(win.acoustic, win.fast_rate_hz, bands)) put(v);

    put(stats::mean(win.capacitive));
    put(stats::variance(win.capacitive));
    for (double v : fft::band_averages(win.capacitive, win.fast_rate_hz, bands)) put(v);

    const std::size_t rise = stats::rise80_index(win.tactile_sum);
    put(stats::maximum(win.tactile_sum));
    put(stats::minimum(win.tactile_sum));
    put(static_cast<double>(rise));
    for (const auto& ch : win.tactile) {
        put(stats::maximum(ch));
        put(stats::minimum(ch));
        put(stats::mean(ch));
        put(stats::variance(ch));
        put(stats::skewness(ch));
        put(stats::kurtosis(ch));
    }
    for (const auto& ch : win.tactile) put(ch[rise]);

    put(stats::mean(win.temperature));
    put(stats::variance(win.temperature));

    if (i != kFeatureCount) throw std::logic_error("feature layout drifted from 100 entries");
    for (double v : fv.values)
        if (!std::isfinite(v)) throw std::invalid_argument("extract_features: non-finite feature value");
    return fv;
}

FeatureVector extract_features(const RecordingRun& run, const FootstepSegment& seg,
                               const SpectralBandSpec& bands) {
    SegmentWindow win;
    const std::size_t sb = seg.slow_begin, se = seg.slow_end;
    win.accel_x = std::span<const double>(run.slow.accel_x).subspan(sb, se - sb);
    win.accel_y = std::span<const double>(run.slow.accel_y).subspan(sb, se - sb);
    win.accel_z = std::span<const double>(run.slow.accel_z).subspan(sb, se - sb);
    win.temperature = std::span<const double>(run.slow.temperature).subspan(sb, se - sb);
    win.acoustic = std::span<const double>(run.fast.acoustic)
                       .subspan(seg.fast_begin, seg.fast_end - seg.fast_begin);
    win.capacitive = std::span<const double>(run.fast.capacitive)
                         .subspan(seg.fast_begin, seg.fast_end - seg.fast_begin);
    for (int c = 0; c < kTactileChannels; ++c) win.tactile[c] = seg.tactile[c];
    win.tactile_sum = seg.tactile_sum;
    win.fast_rate_hz = run.fast.rate_hz;
    return extract_features(win, bands);
}

}  // namespace terrastep
