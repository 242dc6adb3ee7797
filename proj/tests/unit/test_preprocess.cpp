#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "terrastep/preprocess.hpp"
#include "terrastep/rng.hpp"
#include "terrastep/synth.hpp"

using namespace terrastep;

namespace {

// Slow-stream-only fixture; channel 0 carries the given profile. The fast
// stream is a low-rate zero filler spanning the same window.
RecordingRun manual_run(const std::vector<double>& sum_profile, double slow_rate = 45.0) {
    RecordingRun run;
    run.run_id = "manual";
    run.terrain = TerrainClass::Metal;
    run.slow.rate_hz = slow_rate;
    const std::size_t n = sum_profile.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / slow_rate;
        run.slow.t.push_back(t);
        run.slow.accel_x.push_back(0.0);
        run.slow.accel_y.push_back(0.0);
        run.slow.accel_z.push_back(0.0);
        run.slow.temperature.push_back(20.0);
        run.slow.tactile[0].push_back(sum_profile[i]);
        for (int c = 1; c < kTactileChannels; ++c) run.slow.tactile[c].push_back(0.0);
    }
    run.fast.rate_hz = 450.0;
    const double span = run.slow.t.back();
    const auto nf = static_cast<std::size_t>(span * run.fast.rate_hz) + 1;
    for (std::size_t i = 0; i < nf; ++i) {
        run.fast.t.push_back(static_cast<double>(i) / run.fast.rate_hz);
        run.fast.acoustic.push_back(0.0);
        run.fast.capacitive.push_back(0.0);
    }
    return run;
}

}  // namespace

TEST_CASE("detrend on closed-form fixtures") {
    SUBCASE("pure linear input vanishes") {
        const auto out = detrend(std::vector<double>{1, 2, 3, 4, 5});
        for (double v : out) CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("constant input vanishes") {
        const auto out = detrend(std::vector<double>{5, 5, 5});
        for (double v : out) CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("symmetric spike keeps its shape minus the mean") {
        const auto out = detrend(std::vector<double>{0, 0, 1, 0, 0});
        const std::vector<double> want = {-0.2, -0.2, 0.8, -0.2, -0.2};
        REQUIRE(out.size() == want.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            CHECK(out[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
    SUBCASE("fewer than two samples is an error") {
        CHECK_THROWS_AS(detrend(std::vector<double>{1.0}), std::invalid_argument);
    }
}

TEST_CASE("detrend properties on random fixtures") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.next_below(150);
        std::vector<double> x(n);
        for (auto& v : x) v = 5.0 * rng.next_gaussian();

        const auto once = detrend(x);
        // residual has zero mean and zero index correlation
        double mean = 0.0, corr = 0.0;
        const double ibar = 0.5 * static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            mean += once[i];
            corr += (static_cast<double>(i) - ibar) * once[i];
        }
        CHECK(std::abs(mean / static_cast<double>(n)) < 1e-9);
        CHECK(std::abs(corr / static_cast<double>(n * n)) < 1e-9);

        // idempotence
        const auto twice = detrend(once);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(twice[i] - once[i]) < 1e-12);

        // removing any added line changes nothing
        const double a = rng.next_in(-50.0, 50.0), b = rng.next_in(-5.0, 5.0);
        std::vector<double> shifted(n);
        for (std::size_t i = 0; i < n; ++i) shifted[i] = x[i] + a + b * static_cast<double>(i);
        const auto flat = detrend(shifted);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(flat[i] - once[i]) < 1e-9 * std::max(1.0, std::abs(once[i])));
    }
}

TEST_CASE("sum_tactile sums the detrended channels") {
    SUBCASE("all-zero channels stay zero") {
        const auto run = manual_run(std::vector<double>(90, 0.0));
        for (double v : sum_tactile(run).values) CHECK(v == 0.0);
    }
    SUBCASE("a trend-free channel passes through") {
        // zero mean, zero slope: detrending is the identity here
        std::vector<double> profile = {1, -2, 1, 1, -2, 1};
        const auto run = manual_run(profile);
        const auto sum = sum_tactile(run);
        REQUIRE(sum.values.size() == profile.size());
        for (std::size_t i = 0; i < profile.size(); ++i)
            CHECK(sum.values[i] == doctest::Approx(profile[i]).epsilon(1e-9));
        CHECK(sum.rate_hz == run.slow.rate_hz);
    }
}

TEST_CASE("segmentation on a synthetic run recovers the truth boundaries") {
    StepCycleSpec cycle;
    cycle.n_steps = 5;
    const RecordingRun run = generate_run(TerrainClass::Carpet,
                                          default_signatures().at(TerrainClass::Carpet), cycle, 3);
    const auto segments = segment(run, {});
    REQUIRE(segments.size() == 5);
    const double tol = 2.0 / run.slow.rate_hz;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto [truth_start, truth_end] = (*run.truth_boundaries)[i];
        CHECK(std::abs(segments[i].t_start - truth_start) <= tol);
        CHECK(std::abs(segments[i].t_end - truth_end) <= tol);
        CHECK(segments[i].t_end > segments[i].t_start);
        CHECK(segments[i].slow_end > segments[i].slow_begin);
        CHECK(segments[i].fast_end > segments[i].fast_begin);
        // fast and slow slices cover the same window within one slow period
        const double fast_span = run.fast.t[segments[i].fast_end - 1] - run.fast.t[segments[i].fast_begin];
        const double slow_span = run.slow.t[segments[i].slow_end - 1] - run.slow.t[segments[i].slow_begin];
        CHECK(std::abs(fast_span - slow_span) <= 1.0 / run.slow.rate_hz + 1e-9);
    }
}

TEST_CASE("segmentation edge cases") {
    SUBCASE("flat zero run finds nothing") {
        const auto run = manual_run(std::vector<double>(90, 0.0));
        CHECK(segment(run, {}).empty());
    }
    SUBCASE("contacts closer than min_step_gap_s merge") {
        // two 100-unit pulses whose peaks are ~0.35 s apart at 45 Hz
        std::vector<double> profile(135, 0.0);
        for (std::size_t i = 45; i < 54; ++i) profile[i] = 100.0;   // 1.000..1.178 s
        for (std::size_t i = 61; i < 70; ++i) profile[i] = 100.0;   // 1.355..1.533 s
        const auto run = manual_run(profile);
        const auto segments = segment(run, {});
        REQUIRE(segments.size() == 1);
        CHECK(segments[0].t_start <= 45.5 / 45.0);
        CHECK(segments[0].t_end >= 69.5 / 45.0);
    }
    SUBCASE("distinct contacts stay separate") {
        std::vector<double> profile(180, 0.0);
        for (std::size_t i = 45; i < 58; ++i) profile[i] = 100.0;
        for (std::size_t i = 115; i < 128; ++i) profile[i] = 100.0;
        const auto run = manual_run(profile);
        CHECK(segment(run, {}).size() == 2);
    }
    SUBCASE("a run shorter than min_contact_s is an error") {
        const auto run = manual_run(std::vector<double>{0, 1, 0});
        SegmentationParams params;
        params.min_contact_s = 1.0;
        CHECK_THROWS_AS(segment(run, params), std::invalid_argument);
    }
    SUBCASE("bad parameters are rejected") {
        const auto run = manual_run(std::vector<double>(90, 0.0));
        SegmentationParams params;
        params.contact_threshold_frac = 1.5;
        CHECK_THROWS_AS(segment(run, params), std::invalid_argument);
    }
}
