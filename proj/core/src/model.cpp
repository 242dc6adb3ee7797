#include "terrastep/model.hpp"

#include <cmath>
#include <fstream>

namespace terrastep {

using nlohmann::json;

std::string_view algo_name(Algo a) {
    switch (a) {
        case Algo::Knn: return "knn";
        case Algo::Svm: return "svm";
        case Algo::Rf: return "rf";
        case Algo::Gb: return "gb";
        case Algo::Ann: return "ann";
    }
    return "?";
}

std::optional<Algo> parse_algo(std::string_view name) {
    if (name == "knn") return Algo::Knn;
    if (name == "svm") return Algo::Svm;
    if (name == "rf") return Algo::Rf;
    if (name == "gb") return Algo::Gb;
    if (name == "ann") return Algo::Ann;
    return std::nullopt;
}

std::pair<Matrix, std::vector<int>> dataset_matrix(const Dataset& ds,
                                                   std::span<const std::size_t> columns) {
    const std::size_t width = columns.empty() ? kFeatureCount : columns.size();
    Matrix x(ds.rows.size(), width);
    std::vector<int> y;
    y.reserve(ds.rows.size());
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        const auto& row = ds.rows[r];
        if (!row.label) throw std::invalid_argument("dataset_matrix: unlabeled row");
        y.push_back(static_cast<int>(*row.label));
        if (columns.empty()) {
            std::copy(row.values.begin(), row.values.end(), x.row(r).begin());
        } else {
            for (std::size_t c = 0; c < columns.size(); ++c) x.at(r, c) = row.values[columns[c]];
        }
    }
    return {std::move(x), std::move(y)};
}

namespace {

Matrix standardized_train(const Dataset& train, Standardizer& standardizer,
                          std::vector<int>& labels) {
    if (train.empty()) throw std::invalid_argument("fit: empty training set");
    auto [x, y] = dataset_matrix(train);
    standardizer = Standardizer::fit(x);
    standardizer.apply_in_place(x);
    labels = std::move(y);
    return std::move(x);
}

ModelArtifact make_artifact(Algo algo, std::uint64_t seed, const SpectralBandSpec& bands,
                            Standardizer standardizer, json hyperparams,
                            decltype(ModelArtifact::payload) payload) {
    ModelArtifact m;
    m.algo = algo;
    m.train_seed = seed;
    m.bands = bands;
    m.standardizer = std::move(standardizer);
    m.hyperparams = std::move(hyperparams);
    m.payload = std::move(payload);
    return m;
}

}  // namespace

ModelArtifact fit_knn(const Dataset& train, std::uint64_t seed, const KnnParams& params,
                      const SpectralBandSpec& bands) {
    Standardizer st;
    std::vector<int> y;
    Matrix x = standardized_train(train, st, y);
    json hp{{"n_neighbors", params.k},
            {"leaf_size", params.leaf_size},
            {"weight_function", "uniform"},
            {"distance", "minkowski"},
            {"p", params.minkowski_p}};
    return make_artifact(Algo::Knn, seed, bands, std::move(st), std::move(hp),
                         KnnModel::fit(std::move(x), std::move(y), params));
}

ModelArtifact fit_svm(const Dataset& train, std::uint64_t seed, const SvmParams& params,
                      const SpectralBandSpec& bands) {
    Standardizer st;
    std::vector<int> y;
    const Matrix x = standardized_train(train, st, y);
    json hp{{"regularization_c", params.c},
            {"kernel", "rbf"},
            {"decision_function", "one_vs_rest"},
            {"kkt_tol", params.kkt_tol}};
    return make_artifact(Algo::Svm, seed, bands, std::move(st), std::move(hp),
                         SvmModel::fit(x, y, params, seed));
}

ModelArtifact fit_rf(const Dataset& train, std::uint64_t seed, const RfParams& params,
                     const SpectralBandSpec& bands) {
    Standardizer st;
    std::vector<int> y;
    const Matrix x = standardized_train(train, st, y);
    json hp{{"n_trees", params.n_trees},
            {"max_depth", params.max_depth < 0 ? json(nullptr) : json(params.max_depth)},
            {"split_criterion", "gini"}};
    return make_artifact(Algo::Rf, seed, bands, std::move(st), std::move(hp),
                         RandomForest::fit(x, y, params, seed));
}

ModelArtifact fit_gb(const Dataset& train, std::uint64_t seed, const GbParams& params,
                     const SpectralBandSpec& bands) {
    Standardizer st;
    std::vector<int> y;
    const Matrix x = standardized_train(train, st, y);
    json hp{{"loss", "logistic"},
            {"learning_rate", params.learning_rate},
            {"n_estimators", params.n_estimators},
            {"max_depth", params.max_depth}};
    return make_artifact(Algo::Gb, seed, bands, std::move(st), std::move(hp),
                         GradientBoosting::fit(x, y, params, seed));
}

ModelArtifact fit_ann(const Dataset& train, std::uint64_t seed, const AnnParams& params,
                      const SpectralBandSpec& bands) {
    Standardizer st;
    std::vector<int> y;
    const Matrix x = standardized_train(train, st, y);
    json hp{{"hidden_layers", params.hidden},
            {"batch_size", params.batch_size},
            {"activation", "relu"},
            {"optimizer", "adam"},
            {"learning_rate", "adaptive"},
            {"initial_lr", params.initial_lr}};
    return make_artifact(Algo::Ann, seed, bands, std::move(st), std::move(hp),
                         NeuralNet::fit(x, y, kNumTerrains, params, seed));
}

ModelArtifact fit_model(Algo algo, const Dataset& train, std::uint64_t seed,
                        const SpectralBandSpec& bands) {
    switch (algo) {
        case Algo::Knn: return fit_knn(train, seed, {}, bands);
        case Algo::Svm: return fit_svm(train, seed, {}, bands);
        case Algo::Rf: return fit_rf(train, seed, {}, bands);
        case Algo::Gb: return fit_gb(train, seed, {}, bands);
        case Algo::Ann: return fit_ann(train, seed, {}, bands);
    }
    throw std::invalid_argument("fit_model: unknown algorithm");
}

int payload_predict(const decltype(ModelArtifact::payload)& payload,
                    std::span<const double> standardized_row) {
    return std::visit([&](const auto& model) { return model.predict(standardized_row); }, payload);
}

TerrainClass predict(const ModelArtifact& model, std::span<const double> values) {
    if (model.schema_version != kModelSchemaVersion)
        throw SchemaError("model schema version " + std::to_string(model.schema_version) +
                          " not supported");
    if (values.size() != model.standardizer.size())
        throw SchemaError("predict: feature vector has " + std::to_string(values.size()) +
                          " entries, model expects " + std::to_string(model.standardizer.size()));
    for (double v : values)
        if (!std::isfinite(v)) throw SchemaError("predict: non-finite feature value");
    const std::vector<double> z = model.standardizer.apply(values);
    return terrain_from_code(payload_predict(model.payload, z));
}

TerrainClass predict(const ModelArtifact& model, const FeatureVector& fv) {
    return predict(model, std::span<const double>(fv.values));
}

json model_to_json(const ModelArtifact& model) {
    json j;
    j["schema_version"] = model.schema_version;
    j["algo"] = std::string(algo_name(model.algo));
    j["train_seed"] = model.train_seed;
    j["test_fraction"] = model.test_fraction;
    j["hyperparams"] = model.hyperparams;
    j["band_edges_hz"] = model.bands.edges;
    j["standardizer"] = json{{"mean", model.standardizer.mean}, {"stdev", model.standardizer.stdev}};
    j["payload"] = std::visit([](const auto& p) { return p.to_json(); }, model.payload);
    return j;
}

ModelArtifact model_from_json(const json& j) {
    ModelArtifact m;
    try {
        m.schema_version = j.at("schema_version").get<int>();
        if (m.schema_version != kModelSchemaVersion)
            throw SchemaError("model schema version " + std::to_string(m.schema_version) +
                              " not supported");
        const auto algo = parse_algo(j.at("algo").get<std::string>());
        if (!algo) throw SchemaError("unknown algo in model file");
        m.algo = *algo;
        m.train_seed = j.at("train_seed").get<std::uint64_t>();
        m.test_fraction = j.at("test_fraction").get<double>();
        m.hyperparams = j.at("hyperparams");
        const auto& edges = j.at("band_edges_hz");
        if (edges.size() != m.bands.edges.size()) throw SchemaError("model band edge count mismatch");
        for (std::size_t i = 0; i < m.bands.edges.size(); ++i) m.bands.edges[i] = edges[i].get<double>();
        m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
        m.standardizer.stdev = j.at("standardizer").at("stdev").get<std::vector<double>>();
        if (m.standardizer.mean.size() != m.standardizer.stdev.size())
            throw SchemaError("model standardizer mean/stdev mismatch");

        const json& payload = j.at("payload");
        switch (m.algo) {
            case Algo::Knn: m.payload = KnnModel::from_json(payload); break;
            case Algo::Svm: m.payload = SvmModel::from_json(payload); break;
            case Algo::Rf: m.payload = RandomForest::from_json(payload); break;
            case Algo::Gb: m.payload = GradientBoosting::from_json(payload); break;
            case Algo::Ann: m.payload = NeuralNet::from_json(payload); break;
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model file: ") + e.what());
    }
    return m;
}

void save_model(const ModelArtifact& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write model file: " + path);
    out << model_to_json(model).dump(2) << '\n';
}

ModelArtifact load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace terrastep
