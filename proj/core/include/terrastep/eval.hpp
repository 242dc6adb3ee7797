#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "terrastep/model.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

struct LatencyStats {
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
};

struct EvalReport {
    std::array<double, kNumTerrains> per_class_accuracy{};  // percent
    double overall_accuracy = 0.0;                          // percent
    std::array<std::array<int, kNumTerrains>, kNumTerrains> confusion{};  // [true][predicted]
    LatencyStats latency;
};

/// Per-class and overall accuracy, confusion counts, and wall-clock predict
/// latency over the test rows.
EvalReport evaluate(const ModelArtifact& model, const Dataset& test);

enum class Sensor { Temperature, Accelerometer, Microphone, Capacitive, Tactile };

std::string_view sensor_name(Sensor s);
std::optional<Sensor> parse_sensor(std::string_view name);

/// Half-open [begin, end) range of feature indices owned by one sensor.
std::pair<std::size_t, std::size_t> sensor_index_range(Sensor s);

/// Ascending feature indices covered by a sensor subset.
std::vector<std::size_t> sensor_subset_indices(const std::set<Sensor>& subset);

/// Masks the feature layout to the subset, retrains the algorithm on the
/// masked training rows, and evaluates on the masked test rows.
EvalReport ablate(const Dataset& train, const Dataset& test, const std::set<Sensor>& subset,
                  Algo algo, std::uint64_t seed);

/// The ten sensor combinations the ablation study exercises, in table order.
const std::vector<std::pair<std::string, std::set<Sensor>>>& ablation_preset();

/// report.json; timing and machine fields live under "timing" so
/// determinism checks can strip them.
void save_report(const EvalReport& report, Algo algo, const std::string& path);
void save_confusion_csv(const EvalReport& report, const std::string& path);

}  // namespace terrastep
