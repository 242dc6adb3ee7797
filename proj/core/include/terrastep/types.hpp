#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace terrastep {

/// Raised when a file, header, or payload does not match the expected schema
/// (wrong column count, bad label, incompatible model version, ...).
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an iterative optimizer (SMO, ANN training) fails to converge.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// The ten terrain labels. Integer codes are frozen: they are used in
/// serialized artifacts and confusion-matrix indexing and must never change.
enum class TerrainClass : int {
    Metal    = 0,
    Wood     = 1,
    Foam     = 2,
    Mat      = 3,
    Grass    = 4,
    Gravel   = 5,
    Straw    = 6,
    Concrete = 7,
    Carpet   = 8,
    Poppy    = 9,
};

inline constexpr int kNumTerrains = 10;

constexpr std::array<TerrainClass, kNumTerrains> all_terrains() {
    return {TerrainClass::Metal,  TerrainClass::Wood,     TerrainClass::Foam,
            TerrainClass::Mat,    TerrainClass::Grass,    TerrainClass::Gravel,
            TerrainClass::Straw,  TerrainClass::Concrete, TerrainClass::Carpet,
            TerrainClass::Poppy};
}

std::string_view terrain_name(TerrainClass t);

/// Parses "METAL", "WOOD", ... Returns nullopt for anything else (including "UNKNOWN").
std::optional<TerrainClass> parse_terrain(std::string_view name);

inline int terrain_code(TerrainClass t) { return static_cast<int>(t); }

TerrainClass terrain_from_code(int code);

/// A uniformly sampled scalar signal.
struct SampleSeries {
    std::vector<double> values;
    double rate_hz = 0.0;

    std::size_t size() const { return values.size(); }
};

/// One sample of the slow (45 Hz) stream.
struct SlowFrame {
    double t = 0.0;  // seconds since run start
    double accel_x = 0.0, accel_y = 0.0, accel_z = 0.0;  // m/s^2
    double temperature = 0.0;                            // degrees C
    std::array<double, 8> tactile{};                     // Pa, relative
};

/// One sample of the fast (18 kHz) stream.
struct FastFrame {
    double t = 0.0;
    double acoustic = 0.0;    // normalized amplitude in [-1, 1]
    double capacitive = 0.0;  // raw counts
};

inline constexpr int kTactileChannels = 8;

/// Fast channels stored column-wise; `frame(i)` assembles a FastFrame view.
struct FastStream {
    double rate_hz = 18000.0;
    std::vector<double> t;
    std::vector<double> acoustic;
    std::vector<double> capacitive;

    std::size_t size() const { return t.size(); }
    FastFrame frame(std::size_t i) const { return {t[i], acoustic[i], capacitive[i]}; }
};

struct SlowStream {
    double rate_hz = 45.0;
    std::vector<double> t;
    std::vector<double> accel_x, accel_y, accel_z;
    std::vector<double> temperature;
    std::array<std::vector<double>, kTactileChannels> tactile;

    std::size_t size() const { return t.size(); }
    SlowFrame frame(std::size_t i) const {
        SlowFrame f;
        f.t = t[i];
        f.accel_x = accel_x[i];
        f.accel_y = accel_y[i];
        f.accel_z = accel_z[i];
        f.temperature = temperature[i];
        for (int c = 0; c < kTactileChannels; ++c) f.tactile[c] = tactile[c][i];
        return f;
    }
};

/// A dual-rate sensor recording. `terrain == nullopt` means UNKNOWN
/// (inference-only stream). `truth_boundaries` is present only on synthetic
/// runs; each entry is the (start_s, end_s) of one footstep contact as the
/// default segmenter is expected to find it.
struct RecordingRun {
    std::string run_id;
    std::optional<TerrainClass> terrain;
    FastStream fast;
    SlowStream slow;
    std::uint64_t seed = 0;
    std::optional<std::vector<std::pair<double, double>>> truth_boundaries;

    double duration_s() const;

    /// Checks the run invariants: equal-length columns, finite values,
    /// positive rates, fast/slow spans matching within one slow period.
    /// Throws SchemaError on violation.
    void validate() const;
};

inline constexpr std::size_t kFeatureCount = 100;

/// One footstep's 100-dimensional feature record. Layout is frozen, see
/// features.hpp for the index map.
struct FeatureVector {
    std::array<double, kFeatureCount> values{};
    std::optional<TerrainClass> label;
};

/// A labeled feature table. All rows share the frozen 100-wide layout; the
/// column names are the table exported by feature_names().
struct Dataset {
    std::vector<FeatureVector> rows;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }

    /// Rows per class, indexed by terrain code.
    std::array<std::size_t, kNumTerrains> class_counts() const;
};

}  // namespace terrastep
