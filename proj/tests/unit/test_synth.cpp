#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "terrastep/features.hpp"
#include "terrastep/pca.hpp"
#include "terrastep/preprocess.hpp"
#include "terrastep/stats.hpp"
#include "terrastep/synth.hpp"

using namespace terrastep;

TEST_CASE("step count and determinism contracts") {
    StepCycleSpec cycle;
    cycle.n_steps = 5;
    const auto& sig = default_signatures().at(TerrainClass::Straw);

    const RecordingRun a = generate_run(TerrainClass::Straw, sig, cycle, 99);
    REQUIRE(a.truth_boundaries.has_value());
    CHECK(a.truth_boundaries->size() == 5);
    a.validate();

    const RecordingRun b = generate_run(TerrainClass::Straw, sig, cycle, 99);
    CHECK(a.fast.t == b.fast.t);
    CHECK(a.fast.acoustic == b.fast.acoustic);
    CHECK(a.fast.capacitive == b.fast.capacitive);
    CHECK(a.slow.t == b.slow.t);
    CHECK(a.slow.accel_x == b.slow.accel_x);
    CHECK(a.slow.accel_y == b.slow.accel_y);
    CHECK(a.slow.accel_z == b.slow.accel_z);
    CHECK(a.slow.temperature == b.slow.temperature);
    for (int c = 0; c < kTactileChannels; ++c) CHECK(a.slow.tactile[c] == b.slow.tactile[c]);
    CHECK(*a.truth_boundaries == *b.truth_boundaries);

    const RecordingRun c = generate_run(TerrainClass::Straw, sig, cycle, 100);
    CHECK(a.slow.tactile[0] != c.slow.tactile[0]);
}

TEST_CASE("soft terrain rises slower than stiff terrain") {
    StepCycleSpec cycle;
    cycle.n_steps = 4;
    const RecordingRun metal =
        generate_run(TerrainClass::Metal, default_signatures().at(TerrainClass::Metal), cycle, 5);
    const RecordingRun foam =
        generate_run(TerrainClass::Foam, default_signatures().at(TerrainClass::Foam), cycle, 5);

    auto mean_rise = [](const RecordingRun& run) {
        double total = 0.0;
        const auto segments = segment(run, {});
        REQUIRE(!segments.empty());
        for (const auto& seg : segments)
            total += static_cast<double>(stats::rise80_index(seg.tactile_sum));
        return total / static_cast<double>(segments.size());
    };
    CHECK(mean_rise(foam) > mean_rise(metal));
}

TEST_CASE("hold-phase summed pressure maps to press force within 5 percent") {
    StepCycleSpec cycle;
    cycle.n_steps = 4;
    for (TerrainClass t : {TerrainClass::Metal, TerrainClass::Foam, TerrainClass::Poppy}) {
        const RecordingRun run = generate_run(t, default_signatures().at(t), cycle, 11);
        const double expected = cycle.press_force_n * kTactilePaPerNewton;
        for (const auto& [start, end] : *run.truth_boundaries) {
            // middle half of the contact is pure hold for every default terrain
            const double mid0 = start + 0.25 * (end - start);
            const double mid1 = start + 0.75 * (end - start);
            double hold_sum = 0.0;
            int hold_count = 0;
            double rest_sum = 0.0;
            int rest_count = 0;
            for (std::size_t i = 0; i < run.slow.size(); ++i) {
                const double tt = run.slow.t[i];
                double sum = 0.0;
                for (int c = 0; c < kTactileChannels; ++c) sum += run.slow.tactile[c][i];
                if (tt >= mid0 && tt <= mid1) {
                    hold_sum += sum;
                    ++hold_count;
                } else if (tt > start - 0.2 && tt < start - 0.1) {
                    rest_sum += sum;  // local pre-contact baseline
                    ++rest_count;
                }
            }
            REQUIRE(hold_count > 0);
            REQUIRE(rest_count > 0);
            const double plateau = hold_sum / hold_count - rest_sum / rest_count;
            CHECK(plateau == doctest::Approx(expected).epsilon(0.05));
        }
    }
}

TEST_CASE("rest phases return to baseline within the settle noise") {
    StepCycleSpec cycle;
    cycle.n_steps = 6;
    const auto& sig = default_signatures().at(TerrainClass::Metal);  // tightest settle noise
    const RecordingRun run = generate_run(TerrainClass::Metal, sig, cycle, 21);

    // the raw rest-phase sum is the drift line plus baseline noise: fit the
    // line over the rest samples, then every rest window must sit on it
    std::vector<std::pair<double, double>> rest_points;  // (t, raw sum)
    std::vector<std::pair<std::size_t, std::size_t>> windows;
    const auto& bounds = *run.truth_boundaries;
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        const double gap0 = bounds[s].second + 0.05;
        const double gap1 = bounds[s + 1].first - 0.15;
        const std::size_t begin = rest_points.size();
        for (std::size_t i = 0; i < run.slow.size(); ++i) {
            if (run.slow.t[i] > gap0 && run.slow.t[i] < gap1) {
                double sum = 0.0;
                for (int c = 0; c < kTactileChannels; ++c) sum += run.slow.tactile[c][i];
                rest_points.emplace_back(run.slow.t[i], sum);
            }
        }
        REQUIRE(rest_points.size() > begin);
        windows.emplace_back(begin, rest_points.size());
    }

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double n = static_cast<double>(rest_points.size());
    for (const auto& [t, v] : rest_points) {
        st += t;
        sy += v;
        stt += t * t;
        sty += t * v;
    }
    const double slope = (sty - st * sy / n) / (stt - st * st / n);
    const double intercept = sy / n - slope * st / n;

    for (const auto& [begin, end] : windows) {
        double residual = 0.0;
        for (std::size_t i = begin; i < end; ++i)
            residual += rest_points[i].second - (intercept + slope * rest_points[i].first);
        residual /= static_cast<double>(end - begin);
        CHECK(std::abs(residual) <= sig.settle_noise_pa);
    }
}

TEST_CASE("corpus generation") {
    StepCycleSpec cycle;
    SUBCASE("missing terrain is rejected") {
        SignatureTable incomplete = default_signatures();
        incomplete.erase(TerrainClass::Poppy);
        cycle.n_steps = 1;
        CHECK_THROWS_AS(generate_corpus(incomplete, cycle, 1, 7), std::invalid_argument);
    }
    SUBCASE("one step per terrain is still segmentable") {
        const auto runs = generate_corpus(default_signatures(), cycle, 1, 7);
        REQUIRE(runs.size() == 10);
        for (const auto& run : runs) {
            CHECK(run.truth_boundaries->size() == 1);
            CHECK(segment(run, {}).size() == 1);
        }
    }
    SUBCASE("streamed and materialized corpora agree") {
        const auto runs = generate_corpus(default_signatures(), cycle, 2, 31);
        std::size_t i = 0;
        for_each_corpus_run(default_signatures(), cycle, 2, 31, [&](RecordingRun&& run) {
            CHECK(run.run_id == runs[i].run_id);
            CHECK(run.slow.tactile[3] == runs[i].slow.tactile[3]);
            ++i;
        });
        CHECK(i == 10);
    }
}

TEST_CASE("extracted corpus rows form separated class clusters") {
    // every class pair must be linearly separable: centroid distance in the
    // full PCA rotation exceeds the summed per-class spreads measured along
    // the line joining the centroids (radius-based spread is meaningless
    // here because many features are class-flat: each press holds 300 N)
    StepCycleSpec cycle;
    Dataset ds;
    const auto bands = SpectralBandSpec::log_bands(18000.0);
    for_each_corpus_run(default_signatures(), cycle, 4, 99, [&](RecordingRun&& run) {
        for (const auto& seg : segment(run, {})) {
            FeatureVector fv = extract_features(run, seg, bands);
            fv.label = run.terrain;
            ds.rows.push_back(std::move(fv));
        }
    });
    REQUIRE(ds.size() == 40);

    const PcaResult pca = pca_project(ds, static_cast<int>(ds.size()) < 100 ? 40 : 100);
    const std::size_t dims = pca.projected.cols;
    std::array<std::vector<double>, kNumTerrains> centroid;
    std::array<std::vector<std::size_t>, kNumTerrains> members;
    for (auto& c : centroid) c.assign(dims, 0.0);
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const int c = terrain_code(*ds.rows[r].label);
        members[c].push_back(r);
        for (std::size_t k = 0; k < dims; ++k) centroid[c][k] += pca.projected.at(r, k);
    }
    for (int c = 0; c < kNumTerrains; ++c)
        for (auto& v : centroid[c]) v /= static_cast<double>(members[c].size());

    for (int a = 0; a < kNumTerrains; ++a) {
        for (int b = a + 1; b < kNumTerrains; ++b) {
            std::vector<double> axis(dims);
            double norm = 0.0;
            for (std::size_t k = 0; k < dims; ++k) {
                axis[k] = centroid[b][k] - centroid[a][k];
                norm += axis[k] * axis[k];
            }
            norm = std::sqrt(norm);
            for (auto& v : axis) v /= norm;
            auto spread_along = [&](int cls) {
                double acc = 0.0;
                for (std::size_t r : members[cls]) {
                    double proj = 0.0;
                    for (std::size_t k = 0; k < dims; ++k)
                        proj += (pca.projected.at(r, k) - centroid[cls][k]) * axis[k];
                    acc += proj * proj;
                }
                return std::sqrt(acc / static_cast<double>(members[cls].size()));
            };
            const double separation = norm / (spread_along(a) + spread_along(b) + 1e-12);
            INFO("pair ", terrain_name(static_cast<TerrainClass>(a)), " vs ",
                 terrain_name(static_cast<TerrainClass>(b)), " separation ", separation);
            CHECK(separation > 1.0);
        }
    }
}

TEST_CASE("default signature table rows are pairwise distinct") {
    const auto& table = default_signatures();
    auto scalars = [](const TerrainSignature& s) {
        return std::vector<double>{s.stiffness_n_mm,     s.settle_noise_pa, s.impact_amplitude,
                                   s.impact_decay_per_s, s.cap_baseline_counts, s.cap_jitter_counts,
                                   s.temp_mean_c,        s.temp_var_c2,     s.vib_freq_hz,
                                   s.vib_damping_per_s};
    };
    for (TerrainClass a : all_terrains()) {
        for (TerrainClass b : all_terrains()) {
            if (a >= b) continue;
            const auto sa = scalars(table.at(a)), sb = scalars(table.at(b));
            int distinct = 0;
            for (std::size_t i = 0; i < sa.size(); ++i)
                if (sa[i] != sb[i]) ++distinct;
            CHECK(distinct >= 3);
        }
    }
}

TEST_CASE("signature table round-trips through terrains.json") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "terrastep_test_terrains.json";
    save_signatures(default_signatures(), path.string());
    const SignatureTable loaded = load_signatures(path.string());
    REQUIRE(loaded.size() == 10);
    for (TerrainClass t : all_terrains()) {
        CHECK(loaded.at(t).stiffness_n_mm == default_signatures().at(t).stiffness_n_mm);
        CHECK(loaded.at(t).acoustic_bands == default_signatures().at(t).acoustic_bands);
    }
    fs::remove(path);
}

TEST_CASE("parameter validation") {
    StepCycleSpec cycle;
    cycle.n_steps = 0;
    CHECK_THROWS_AS(
        generate_run(TerrainClass::Mat, default_signatures().at(TerrainClass::Mat), cycle, 1),
        std::invalid_argument);
    TerrainSignature bad = default_signatures().at(TerrainClass::Mat);
    bad.stiffness_n_mm = 0.0;
    StepCycleSpec ok;
    ok.n_steps = 1;
    CHECK_THROWS_AS(generate_run(TerrainClass::Mat, bad, ok, 1), std::invalid_argument);
}
