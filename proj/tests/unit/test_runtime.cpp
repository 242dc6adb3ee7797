#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "terrastep/model.hpp"
#include "terrastep/pipeline.hpp"
#include "terrastep/preprocess.hpp"
#include "terrastep/split.hpp"
#include "terrastep/synth.hpp"

using namespace terrastep;
namespace fs = std::filesystem;

namespace {

// small real corpus: 6 steps per terrain, offline features + an RF model
struct RuntimeFixture {
    std::vector<RecordingRun> runs;
    Dataset dataset;
    ModelArtifact model;

    RuntimeFixture() {
        StepCycleSpec cycle;
        const auto bands = SpectralBandSpec::log_bands(18000.0);
        runs = generate_corpus(default_signatures(), cycle, 6, 4242);
        for (const auto& run : runs) {
            for (const auto& seg : segment(run, {})) {
                FeatureVector fv = extract_features(run, seg, bands);
                fv.label = run.terrain;
                dataset.rows.push_back(std::move(fv));
            }
        }
        model = fit_rf(dataset, 7, {.n_trees = 30});
    }
};

const RuntimeFixture& fixture() {
    static const RuntimeFixture f;
    return f;
}

}  // namespace

TEST_CASE("streaming segmentation matches offline boundaries within 2 slow samples") {
    for (const auto& run : fixture().runs) {
        const auto offline = segment(run, {});
        StreamingSegmenter seg({}, run.slow.rate_hz, 8.0);
        std::vector<ContactBoundary> online;
        for (std::size_t i = 0; i < run.slow.size(); ++i) {
            double sum = 0.0;
            for (int c = 0; c < kTactileChannels; ++c) sum += run.slow.tactile[c][i];
            for (const auto& b : seg.push(run.slow.t[i], sum)) online.push_back(b);
        }
        for (const auto& b : seg.finish()) online.push_back(b);

        REQUIRE(online.size() == offline.size());
        const double tol = 2.0 / run.slow.rate_hz + 1e-9;
        for (std::size_t i = 0; i < online.size(); ++i) {
            CHECK(std::abs(online[i].t_start - offline[i].t_start) <= tol);
            CHECK(std::abs(online[i].t_end - offline[i].t_end) <= tol);
        }
    }
}

TEST_CASE("pipeline labels equal the offline path") {
    const auto& f = fixture();
    const auto bands = f.model.bands;
    for (const auto& run : f.runs) {
        PipelineConfig cfg;
        const auto events = run_pipeline(run, f.model, cfg);

        const auto offline = segment(run, {});
        REQUIRE(events.size() == offline.size());
        for (std::size_t i = 0; i < events.size(); ++i) {
            const TerrainClass offline_label =
                predict(f.model, extract_features(run, offline[i], bands));
            CHECK(events[i].label == offline_label);
            CHECK(events[i].step_index == static_cast<int>(i));
            CHECK(events[i].t_end > events[i].t_start);
            CHECK(events[i].extract_latency_ms >= 0.0);
            CHECK(events[i].classify_latency_ms >= 0.0);
            // the bang-bang command follows the label
            CHECK(events[i].command.action == decide(events[i].label).action);
        }
        // events arrive in causal order
        for (std::size_t i = 1; i < events.size(); ++i)
            CHECK(events[i].t_end >= events[i - 1].t_end);
    }
}

TEST_CASE("a ten-step gravel run classifies as gravel and deploys throughout") {
    StepCycleSpec cycle;
    cycle.n_steps = 10;
    const RecordingRun run = generate_run(
        TerrainClass::Gravel, default_signatures().at(TerrainClass::Gravel), cycle, 909);
    PipelineConfig cfg;
    const auto events = run_pipeline(run, fixture().model, cfg);
    REQUIRE(events.size() == 10);
    int gravel = 0;
    for (const auto& ev : events) {
        if (ev.label == TerrainClass::Gravel) {
            ++gravel;
            CHECK(ev.command.action == FootAction::Deploy);
        }
    }
    CHECK(gravel >= 9);
}

TEST_CASE("empty run produces no events") {
    RecordingRun empty;
    empty.run_id = "empty";
    PipelineConfig cfg;
    CHECK(run_pipeline(empty, fixture().model, cfg).empty());
    CHECK(std::isinf(throughput_ratio(empty)));
}

TEST_CASE("threaded pipeline produces identical events") {
    const auto& run = fixture().runs[5];  // gravel
    PipelineConfig single;
    const auto a = run_pipeline(run, fixture().model, single);
    PipelineConfig threaded;
    threaded.threaded = true;
    const auto b = run_pipeline(run, fixture().model, threaded);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].t_start == b[i].t_start);
        CHECK(a[i].t_end == b[i].t_end);
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].command.action == b[i].command.action);
    }
}

TEST_CASE("event and actuation logs are written as JSONL") {
    const fs::path dir = fs::temp_directory_path() / "terrastep_test_runtime";
    fs::create_directories(dir);
    const auto& run = fixture().runs[0];  // metal: every command retracts
    PipelineConfig cfg;
    cfg.events_path = (dir / "events.jsonl").string();
    cfg.actuation_log_path = (dir / "actuation.jsonl").string();
    int observed = 0;
    cfg.on_event = [&](const StepEvent&) { ++observed; };
    const auto events = run_pipeline(run, fixture().model, cfg);
    CHECK(observed == static_cast<int>(events.size()));

    std::ifstream actuation(dir / "actuation.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(actuation, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("t"));
        CHECK(j.contains("label"));
        CHECK(j.contains("action"));
        CHECK(j.contains("tarsal_angle_deg"));
        CHECK(j.contains("contact_area_factor"));
        ++lines;
    }
    CHECK(lines == events.size());
}

TEST_CASE("segmenter buffers are bounded by the window") {
    StreamingSegmenter seg({}, 45.0, 8.0);
    CHECK(seg.max_buffer_samples() == static_cast<std::size_t>(std::ceil(8.0 * 45.0)) + 2);
}

TEST_CASE("bench_latency times every model over real steps") {
    const fs::path dir = fs::temp_directory_path() / "terrastep_test_bench";
    fs::create_directories(dir);
    const fs::path model_path = dir / "rf.json";
    save_model(fixture().model, model_path.string());

    const auto& run = fixture().runs[3];
    const BenchResult result = bench_latency({model_path.string()}, run, 5);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].algo == "rf");
    CHECK(result.rows[0].steps == 5);
    CHECK(result.rows[0].mean_ms >= 0.0);
    CHECK(!result.machine.empty());

    CHECK_THROWS_AS(bench_latency({model_path.string()}, run, 100), std::invalid_argument);
    CHECK_THROWS_AS(bench_latency({model_path.string()}, run, 0), std::invalid_argument);
}

TEST_CASE("fast path keeps up with the sample rate") {
    const double ratio = throughput_ratio(fixture().runs[2]);
    CHECK(ratio > 1.0);
}
