#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "terrastep/io.hpp"
#include "terrastep/rng.hpp"
#include "terrastep/split.hpp"
#include "terrastep/synth.hpp"
#include "terrastep/types.hpp"

using namespace terrastep;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "terrastep_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RecordingRun small_run(std::uint64_t seed = 7) {
    StepCycleSpec cycle;
    cycle.n_steps = 2;
    return generate_run(TerrainClass::Gravel, default_signatures().at(TerrainClass::Gravel),
                        cycle, seed);
}

Dataset uniform_dataset(std::size_t rows_per_class, int n_classes = kNumTerrains) {
    Dataset ds;
    Rng rng(3);
    for (int c = 0; c < n_classes; ++c) {
        for (std::size_t r = 0; r < rows_per_class; ++r) {
            FeatureVector fv;
            for (auto& v : fv.values) v = rng.next_gaussian();
            fv.label = static_cast<TerrainClass>(c);
            ds.rows.push_back(fv);
        }
    }
    return ds;
}

}  // namespace

TEST_CASE("terrain codes are frozen") {
    CHECK(kNumTerrains == 10);
    CHECK(terrain_code(TerrainClass::Metal) == 0);
    CHECK(terrain_code(TerrainClass::Wood) == 1);
    CHECK(terrain_code(TerrainClass::Foam) == 2);
    CHECK(terrain_code(TerrainClass::Mat) == 3);
    CHECK(terrain_code(TerrainClass::Grass) == 4);
    CHECK(terrain_code(TerrainClass::Gravel) == 5);
    CHECK(terrain_code(TerrainClass::Straw) == 6);
    CHECK(terrain_code(TerrainClass::Concrete) == 7);
    CHECK(terrain_code(TerrainClass::Carpet) == 8);
    CHECK(terrain_code(TerrainClass::Poppy) == 9);
    for (TerrainClass t : all_terrains()) CHECK(parse_terrain(terrain_name(t)) == t);
    CHECK(!parse_terrain("UNKNOWN").has_value());
    CHECK_THROWS_AS(terrain_from_code(10), std::invalid_argument);
}

TEST_CASE("splitmix64 outputs for seed 0 are frozen") {
    Rng rng(0);
    CHECK(rng.next_u64() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next_u64() == 0x06C45D188009454FULL);
    CHECK(rng.next_u64() == 0xF88BB8A8724C81ECULL);
}

TEST_CASE("rng streams are deterministic and label-separated") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(Rng::child_seed(42, "tactile") == Rng::child_seed(42, "tactile"));
    CHECK(Rng::child_seed(42, "tactile") != Rng::child_seed(42, "acoustic"));
    CHECK(Rng::child_seed(42, "tactile") != Rng::child_seed(43, "tactile"));

    Rng g(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = g.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng h(6);
    for (int i = 0; i < 1000; ++i) CHECK(h.next_below(7) < 7);
}

TEST_CASE("stratified split matches the documented counts") {
    SUBCASE("1000 rows x 10 terrains at 0.2 gives 8000/2000") {
        const Dataset ds = uniform_dataset(1000);
        const auto [train, test] = split_train_test(ds, 0.2, 1);
        CHECK(train.size() == 8000);
        CHECK(test.size() == 2000);
        const auto counts = test.class_counts();
        for (std::size_t c : counts) CHECK(c == 200);
    }
    SUBCASE("10 rows of one class at 0.5 halves exactly") {
        const Dataset ds = uniform_dataset(10, 1);
        const auto [train, test] = split_train_test(ds, 0.5, 9);
        CHECK(train.size() == 5);
        CHECK(test.size() == 5);
    }
    SUBCASE("same inputs give identical partitions") {
        const Dataset ds = uniform_dataset(50);
        const auto [train1, test1] = split_train_test(ds, 0.3, 4);
        const auto [train2, test2] = split_train_test(ds, 0.3, 4);
        REQUIRE(test1.size() == test2.size());
        for (std::size_t i = 0; i < test1.size(); ++i)
            CHECK(test1.rows[i].values == test2.rows[i].values);
    }
    SUBCASE("union is a permutation of the input") {
        const Dataset ds = uniform_dataset(20);
        const auto [train, test] = split_train_test(ds, 0.25, 11);
        CHECK(train.size() + test.size() == ds.size());
        // first feature value acts as a row fingerprint
        std::vector<double> seen;
        for (const auto& r : train.rows) seen.push_back(r.values[0]);
        for (const auto& r : test.rows) seen.push_back(r.values[0]);
        std::vector<double> expected;
        for (const auto& r : ds.rows) expected.push_back(r.values[0]);
        std::sort(seen.begin(), seen.end());
        std::sort(expected.begin(), expected.end());
        CHECK(seen == expected);
    }
    SUBCASE("error cases") {
        CHECK_THROWS_AS(split_train_test(Dataset{}, 0.2, 0), std::invalid_argument);
        const Dataset ds = uniform_dataset(4);
        CHECK_THROWS_AS(split_train_test(ds, 0.0, 0), std::invalid_argument);
        CHECK_THROWS_AS(split_train_test(ds, 1.0, 0), std::invalid_argument);
        Dataset lone = uniform_dataset(3, 1);
        FeatureVector extra;
        extra.label = TerrainClass::Poppy;
        lone.rows.push_back(extra);  // POPPY has a single row
        CHECK_THROWS_AS(split_train_test(lone, 0.5, 0), std::invalid_argument);
    }
}

TEST_CASE("run files round-trip bit-exactly") {
    const fs::path dir = temp_dir("run_roundtrip");
    const RecordingRun run = small_run();
    save_run(run, dir.string());
    const RecordingRun loaded = load_run(dir.string());

    CHECK(loaded.run_id == run.run_id);
    CHECK(loaded.terrain == run.terrain);
    CHECK(loaded.seed == run.seed);
    CHECK(loaded.fast.rate_hz == run.fast.rate_hz);
    CHECK(loaded.slow.rate_hz == run.slow.rate_hz);
    REQUIRE(loaded.truth_boundaries.has_value());
    CHECK(*loaded.truth_boundaries == *run.truth_boundaries);
    CHECK(loaded.fast.t == run.fast.t);
    CHECK(loaded.fast.acoustic == run.fast.acoustic);
    CHECK(loaded.fast.capacitive == run.fast.capacitive);
    CHECK(loaded.slow.t == run.slow.t);
    CHECK(loaded.slow.accel_x == run.slow.accel_x);
    CHECK(loaded.slow.temperature == run.slow.temperature);
    for (int c = 0; c < kTactileChannels; ++c) CHECK(loaded.slow.tactile[c] == run.slow.tactile[c]);
}

TEST_CASE("run files with a bad schema are rejected") {
    SUBCASE("7 tactile columns") {
        const fs::path dir = temp_dir("run_badcols");
        save_run(small_run(), dir.string());
        std::ofstream slow(dir / "slow.csv", std::ios::binary);
        slow << "t,ax,ay,az,temp,tac0,tac1,tac2,tac3,tac4,tac5,tac6\n";
        slow << "0,0,0,0,20,1,1,1,1,1,1,1\n";
        slow.close();
        CHECK_THROWS_AS(load_run(dir.string()), SchemaError);
    }
    SUBCASE("fast/slow spans differing beyond one slow period") {
        const fs::path dir = temp_dir("run_badspan");
        RecordingRun run = small_run();
        // drop the last second of slow data: span difference ~1 s >> 1/45
        const std::size_t keep = run.slow.size() - 45;
        run.slow.t.resize(keep);
        run.slow.accel_x.resize(keep);
        run.slow.accel_y.resize(keep);
        run.slow.accel_z.resize(keep);
        run.slow.temperature.resize(keep);
        for (auto& ch : run.slow.tactile) ch.resize(keep);
        CHECK_THROWS_AS(run.validate(), SchemaError);
        CHECK_THROWS_AS(save_run(run, dir.string()), SchemaError);
    }
    SUBCASE("non-finite value") {
        const fs::path dir = temp_dir("run_nonfinite");
        save_run(small_run(), dir.string());
        std::ofstream fast(dir / "fast.csv", std::ios::binary);
        fast << "t,acoustic,capacitive\nnan,0,0\n";
        fast.close();
        CHECK_THROWS_AS(load_run(dir.string()), SchemaError);
    }
}

TEST_CASE("dataset files round-trip") {
    const fs::path dir = temp_dir("dataset");
    SUBCASE("empty dataset is a header-only file") {
        const fs::path path = dir / "empty.csv";
        save_dataset(Dataset{}, path.string());
        std::ifstream in(path);
        std::string line;
        int lines = 0;
        while (std::getline(in, line))
            if (!line.empty()) ++lines;
        CHECK(lines == 1);
        CHECK(load_dataset(path.string()).empty());
    }
    SUBCASE("rows round-trip bit-exactly") {
        const fs::path path = dir / "three.csv";
        Dataset ds = uniform_dataset(1, 3);
        save_dataset(ds, path.string());
        const Dataset loaded = load_dataset(path.string());
        REQUIRE(loaded.size() == ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) {
            CHECK(loaded.rows[i].values == ds.rows[i].values);
            CHECK(loaded.rows[i].label == ds.rows[i].label);
        }
    }
    SUBCASE("a 99-value row is rejected") {
        const fs::path path = dir / "short.csv";
        save_dataset(uniform_dataset(1, 1), path.string());
        std::string contents;
        {
            std::ifstream in(path);
            std::string line;
            std::getline(in, contents);
            contents += '\n';
        }
        for (std::size_t i = 0; i < 99; ++i) contents += "0,";
        contents += "METAL\n";
        std::ofstream(path, std::ios::binary) << contents;
        CHECK_THROWS_AS(load_dataset(path.string()), SchemaError);
    }
}
