#include "terrastep/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "terrastep/pipeline.hpp"

namespace terrastep {

using nlohmann::json;

namespace {

EvalReport evaluate_rows(const decltype(ModelArtifact::payload)& payload,
                         const Standardizer& standardizer, const Matrix& x,
                         const std::vector<int>& y) {
    if (x.rows == 0) throw std::invalid_argument("evaluate: empty test set");

    EvalReport report;
    std::vector<double> latencies_ms;
    latencies_ms.reserve(x.rows);

    std::array<int, kNumTerrains> per_class_total{}, per_class_correct{};
    int correct = 0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        const std::vector<double> z = standardizer.apply(x.row(r));
        const auto t0 = std::chrono::steady_clock::now();
        const int pred = payload_predict(payload, z);
        const auto t1 = std::chrono::steady_clock::now();
        latencies_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());

        ++report.confusion[y[r]][pred];
        ++per_class_total[y[r]];
        if (pred == y[r]) {
            ++per_class_correct[y[r]];
            ++correct;
        }
    }

    for (int c = 0; c < kNumTerrains; ++c)
        report.per_class_accuracy[c] =
            per_class_total[c] > 0
                ? 100.0 * static_cast<double>(per_class_correct[c]) / per_class_total[c]
                : 0.0;
    report.overall_accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(x.rows);

    std::sort(latencies_ms.begin(), latencies_ms.end());
    report.latency.mean_ms =
        std::accumulate(latencies_ms.begin(), latencies_ms.end(), 0.0) / latencies_ms.size();
    report.latency.p50_ms = latencies_ms[latencies_ms.size() / 2];
    report.latency.p95_ms = latencies_ms[std::min(latencies_ms.size() - 1,
                                                  static_cast<std::size_t>(latencies_ms.size() * 0.95))];
    return report;
}

}  // namespace

EvalReport evaluate(const ModelArtifact& model, const Dataset& test) {
    auto [x, y] = dataset_matrix(test);
    return evaluate_rows(model.payload, model.standardizer, x, y);
}

std::string_view sensor_name(Sensor s) {
    switch (s) {
        case Sensor::Temperature: return "temperature";
        case Sensor::Accelerometer: return "accelerometer";
        case Sensor::Microphone: return "microphone";
        case Sensor::Capacitive: return "capacitive";
        case Sensor::Tactile: return "tactile";
    }
    return "?";
}

std::optional<Sensor> parse_sensor(std::string_view name) {
    for (Sensor s : {Sensor::Temperature, Sensor::Accelerometer, Sensor::Microphone,
                     Sensor::Capacitive, Sensor::Tactile})
        if (sensor_name(s) == name) return s;
    // common aliases
    if (name == "temp") return Sensor::Temperature;
    if (name == "accel") return Sensor::Accelerometer;
    if (name == "mic" || name == "acoustic") return Sensor::Microphone;
    if (name == "cap") return Sensor::Capacitive;
    return std::nullopt;
}

std::pair<std::size_t, std::size_t> sensor_index_range(Sensor s) {
    switch (s) {
        case Sensor::Accelerometer: return {kAccelBegin, kAcousticBegin};
        case Sensor::Microphone: return {kAcousticBegin, kCapacitiveBegin};
        case Sensor::Capacitive: return {kCapacitiveBegin, kTactileBegin};
        case Sensor::Tactile: return {kTactileBegin, kTemperatureBegin};
        case Sensor::Temperature: return {kTemperatureBegin, kFeatureCount};
    }
    return {0, 0};
}

std::vector<std::size_t> sensor_subset_indices(const std::set<Sensor>& subset) {
    std::vector<std::size_t> out;
    for (Sensor s : {Sensor::Accelerometer, Sensor::Microphone, Sensor::Capacitive,
                     Sensor::Tactile, Sensor::Temperature}) {
        if (!subset.contains(s)) continue;
        const auto [begin, end] = sensor_index_range(s);
        for (std::size_t i = begin; i < end; ++i) out.push_back(i);
    }
    return out;
}

EvalReport ablate(const Dataset& train, const Dataset& test, const std::set<Sensor>& subset,
                  Algo algo, std::uint64_t seed) {
    if (subset.empty()) throw std::invalid_argument("ablate: empty sensor subset");
    const std::vector<std::size_t> columns = sensor_subset_indices(subset);

    auto [x, y] = dataset_matrix(train, columns);
    const Standardizer standardizer = Standardizer::fit(x);
    standardizer.apply_in_place(x);

    decltype(ModelArtifact::payload) payload;
    switch (algo) {
        case Algo::Knn: payload = KnnModel::fit(std::move(x), std::move(y), {}); break;
        case Algo::Svm: payload = SvmModel::fit(x, y, {}, seed); break;
        case Algo::Rf: payload = RandomForest::fit(x, y, {}, seed); break;
        case Algo::Gb: payload = GradientBoosting::fit(x, y, {}, seed); break;
        case Algo::Ann: payload = NeuralNet::fit(x, y, kNumTerrains, {}, seed); break;
    }

    auto [tx, ty] = dataset_matrix(test, columns);
    return evaluate_rows(payload, standardizer, tx, ty);
}

const std::vector<std::pair<std::string, std::set<Sensor>>>& ablation_preset() {
    using S = Sensor;
    static const std::vector<std::pair<std::string, std::set<Sensor>>> preset = {
        {"all", {S::Temperature, S::Accelerometer, S::Microphone, S::Capacitive, S::Tactile}},
        {"temperature", {S::Temperature}},
        {"accelerometer", {S::Accelerometer}},
        {"microphone", {S::Microphone}},
        {"capacitive", {S::Capacitive}},
        {"tactile", {S::Tactile}},
        {"temp + mic + cap", {S::Temperature, S::Microphone, S::Capacitive}},
        {"temp + cap", {S::Temperature, S::Capacitive}},
        {"temp + mic", {S::Temperature, S::Microphone}},
        {"mic + cap", {S::Microphone, S::Capacitive}},
    };
    return preset;
}

void save_report(const EvalReport& report, Algo algo, const std::string& path) {
    json j;
    j["schema_version"] = 1;
    j["algo"] = std::string(algo_name(algo));
    j["overall_accuracy"] = report.overall_accuracy;
    json per_class;
    for (int c = 0; c < kNumTerrains; ++c)
        per_class[std::string(terrain_name(static_cast<TerrainClass>(c)))] =
            report.per_class_accuracy[c];
    j["per_class_accuracy"] = per_class;
    j["confusion"] = report.confusion;
    // timing is hardware noise; kept apart so byte comparisons can drop it
    j["timing"] = json{{"predict_mean_ms", report.latency.mean_ms},
                       {"predict_p50_ms", report.latency.p50_ms},
                       {"predict_p95_ms", report.latency.p95_ms},
                       {"machine", machine_fingerprint()}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write report: " + path);
    out << j.dump(2) << '\n';
}

void save_confusion_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write confusion matrix: " + path);
    out << "true\\pred";
    for (int c = 0; c < kNumTerrains; ++c) out << ',' << terrain_name(static_cast<TerrainClass>(c));
    out << '\n';
    for (int r = 0; r < kNumTerrains; ++r) {
        out << terrain_name(static_cast<TerrainClass>(r));
        for (int c = 0; c < kNumTerrains; ++c) out << ',' << report.confusion[r][c];
        out << '\n';
    }
}

}  // namespace terrastep
