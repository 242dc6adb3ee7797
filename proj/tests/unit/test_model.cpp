#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "support/fixtures.hpp"
#include "terrastep/eval.hpp"
#include "terrastep/model.hpp"
#include "terrastep/rng.hpp"
#include "terrastep/split.hpp"

using namespace terrastep;
namespace fs = std::filesystem;

namespace {

std::vector<FeatureVector> random_vectors(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<FeatureVector> out(n);
    for (auto& fv : out)
        for (auto& v : fv.values) v = 10.0 * rng.next_gaussian();
    return out;
}

}  // namespace

TEST_CASE("every algorithm round-trips through model.json with identical predictions") {
    const Dataset ds = fixtures::blob_dataset(12, 5);
    const auto vectors = random_vectors(1000, 6);
    const fs::path dir = fs::temp_directory_path() / "terrastep_test_models";
    fs::create_directories(dir);

    AnnParams quick_ann;
    quick_ann.max_epochs = 30;

    for (Algo algo : {Algo::Knn, Algo::Svm, Algo::Rf, Algo::Gb, Algo::Ann}) {
        const ModelArtifact model = algo == Algo::Ann ? fit_ann(ds, 3, quick_ann)
                                                      : fit_model(algo, ds, 3);
        const fs::path path = dir / (std::string(algo_name(algo)) + ".json");
        save_model(model, path.string());
        const ModelArtifact loaded = load_model(path.string());

        CHECK(loaded.algo == model.algo);
        CHECK(loaded.train_seed == model.train_seed);
        CHECK(loaded.standardizer.mean == model.standardizer.mean);
        CHECK(loaded.standardizer.stdev == model.standardizer.stdev);
        CHECK(model_to_json(loaded).dump() == model_to_json(model).dump());

        for (const FeatureVector& fv : vectors) CHECK(predict(loaded, fv) == predict(model, fv));
    }
}

TEST_CASE("training is deterministic: identical payload bytes for identical seeds") {
    const Dataset ds = fixtures::blob_dataset(10, 7);
    AnnParams quick_ann;
    quick_ann.max_epochs = 15;
    for (Algo algo : {Algo::Knn, Algo::Svm, Algo::Rf, Algo::Gb, Algo::Ann}) {
        const ModelArtifact a = algo == Algo::Ann ? fit_ann(ds, 11, quick_ann)
                                                  : fit_model(algo, ds, 11);
        const ModelArtifact b = algo == Algo::Ann ? fit_ann(ds, 11, quick_ann)
                                                  : fit_model(algo, ds, 11);
        CHECK(model_to_json(a).dump() == model_to_json(b).dump());
    }
}

TEST_CASE("every algorithm classifies its own training rows on a separable corpus") {
    const Dataset ds = fixtures::blob_dataset(16, 23);
    for (Algo algo : {Algo::Knn, Algo::Svm, Algo::Rf, Algo::Gb, Algo::Ann}) {
        const ModelArtifact model = fit_model(algo, ds, 4);
        std::size_t correct = 0;
        for (const auto& row : ds.rows)
            if (predict(model, row) == *row.label) ++correct;
        INFO("algo ", algo_name(algo), " train accuracy ", correct, "/", ds.size());
        CHECK(correct == ds.size());
    }
}

TEST_CASE("standardizer clamps constant features") {
    Matrix x(4, 3);
    for (std::size_t r = 0; r < 4; ++r) {
        x.at(r, 0) = 5.0;  // constant
        x.at(r, 1) = static_cast<double>(r);
        x.at(r, 2) = -1.0 * static_cast<double>(r);
    }
    const Standardizer s = Standardizer::fit(x);
    CHECK(s.stdev[0] == 1.0);
    CHECK(s.mean[0] == 5.0);
    const auto z = s.apply(x.row(2));
    CHECK(z[0] == 0.0);
    CHECK(std::isfinite(z[1]));
}

TEST_CASE("predict validates its input") {
    const Dataset ds = fixtures::blob_dataset(6, 9);
    const ModelArtifact model = fit_rf(ds, 1, {.n_trees = 5});

    const std::vector<double> short_vec(99, 0.0);
    CHECK_THROWS_AS(predict(model, short_vec), SchemaError);

    FeatureVector bad;
    bad.values[10] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(predict(model, bad), SchemaError);

    ModelArtifact wrong_version = model;
    wrong_version.schema_version = 99;
    FeatureVector ok{};
    CHECK_THROWS_AS(predict(wrong_version, ok), SchemaError);
}

TEST_CASE("evaluate basics") {
    const Dataset ds = fixtures::blob_dataset(20, 13);
    SUBCASE("a memorizing classifier scores 100% with a diagonal confusion") {
        const ModelArtifact model = fit_rf(ds, 2);
        const EvalReport report = evaluate(model, ds);
        CHECK(report.overall_accuracy == 100.0);
        for (int c = 0; c < kNumTerrains; ++c) {
            CHECK(report.per_class_accuracy[c] == 100.0);
            for (int p = 0; p < kNumTerrains; ++p)
                CHECK(report.confusion[c][p] == (c == p ? 20 : 0));
        }
        CHECK(report.latency.mean_ms >= 0.0);
        CHECK(report.latency.p95_ms >= report.latency.p50_ms);
    }
    SUBCASE("a majority-vote dummy scores 10% on a balanced 10-class set") {
        // k = n makes every prediction the global majority vote; the
        // balanced tie resolves to the lowest class code
        KnnParams dummy;
        dummy.k = static_cast<int>(ds.size());
        const ModelArtifact model = fit_knn(ds, 2, dummy);
        const EvalReport report = evaluate(model, ds);
        CHECK(report.overall_accuracy == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(report.per_class_accuracy[0] == 100.0);
        CHECK(report.per_class_accuracy[1] == 0.0);
        // confusion row sums equal per-class test counts
        for (int c = 0; c < kNumTerrains; ++c) {
            int row_sum = 0;
            for (int p = 0; p < kNumTerrains; ++p) row_sum += report.confusion[c][p];
            CHECK(row_sum == 20);
        }
        // overall equals the count-weighted mean of per-class accuracy
        double weighted = 0.0;
        for (int c = 0; c < kNumTerrains; ++c) weighted += report.per_class_accuracy[c] * 20;
        CHECK(report.overall_accuracy == doctest::Approx(weighted / ds.size()).epsilon(1e-12));
    }
}

TEST_CASE("sensor masks cover the frozen layout") {
    CHECK(sensor_index_range(Sensor::Accelerometer) == std::pair<std::size_t, std::size_t>{0, 18});
    CHECK(sensor_index_range(Sensor::Microphone) == std::pair<std::size_t, std::size_t>{18, 28});
    CHECK(sensor_index_range(Sensor::Capacitive) == std::pair<std::size_t, std::size_t>{28, 39});
    CHECK(sensor_index_range(Sensor::Tactile) == std::pair<std::size_t, std::size_t>{39, 98});
    CHECK(sensor_index_range(Sensor::Temperature) == std::pair<std::size_t, std::size_t>{98, 100});

    const auto tactile = sensor_subset_indices({Sensor::Tactile});
    REQUIRE(tactile.size() == 59);
    CHECK(tactile.front() == 39);
    CHECK(tactile.back() == 97);

    const auto all = sensor_subset_indices({Sensor::Temperature, Sensor::Accelerometer,
                                            Sensor::Microphone, Sensor::Capacitive,
                                            Sensor::Tactile});
    REQUIRE(all.size() == kFeatureCount);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
}

TEST_CASE("ablation") {
    const Dataset ds = fixtures::blob_dataset(14, 17);
    const auto [train, test] = split_train_test(ds, 0.25, 3);
    SUBCASE("the full subset reproduces the plain evaluation") {
        const std::set<Sensor> all{Sensor::Temperature, Sensor::Accelerometer, Sensor::Microphone,
                                   Sensor::Capacitive, Sensor::Tactile};
        const EvalReport via_ablate = ablate(train, test, all, Algo::Rf, 21);
        const ModelArtifact direct = fit_rf(train, 21);
        const EvalReport via_eval = evaluate(direct, test);
        CHECK(via_ablate.overall_accuracy == via_eval.overall_accuracy);
        CHECK(via_ablate.confusion == via_eval.confusion);
    }
    SUBCASE("empty subset is rejected") {
        CHECK_THROWS_AS(ablate(train, test, {}, Algo::Rf, 1), std::invalid_argument);
    }
    SUBCASE("the preset combination list is frozen") {
        const auto& preset = ablation_preset();
        REQUIRE(preset.size() == 10);
        CHECK(preset[0].first == "all");
        CHECK(preset[0].second.size() == 5);
        CHECK(preset[1].first == "temperature");
        CHECK(preset[5].first == "tactile");
        CHECK(preset[9].first == "mic + cap");
        CHECK(preset[9].second == std::set<Sensor>{Sensor::Microphone, Sensor::Capacitive});
    }
}
