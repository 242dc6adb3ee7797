#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"
#include "terrastep/ann.hpp"
#include "terrastep/fft.hpp"
#include "terrastep/forest.hpp"
#include "terrastep/gboost.hpp"
#include "terrastep/knn.hpp"
#include "terrastep/standardize.hpp"
#include "terrastep/svm.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

enum class Algo { Knn, Svm, Rf, Gb, Ann };

std::string_view algo_name(Algo a);
std::optional<Algo> parse_algo(std::string_view name);

inline constexpr int kModelSchemaVersion = 1;

/// A trained classifier plus everything inference needs: the training
/// standardizer, the spectral band edges the features were extracted with,
/// and the hyperparameters for the record. Serializes to versioned JSON.
struct ModelArtifact {
    Algo algo = Algo::Rf;
    int schema_version = kModelSchemaVersion;
    std::uint64_t train_seed = 0;
    /// Fraction held out by the stratified split this model was trained
    /// under; 0 means the model saw every row it was given.
    double test_fraction = 0.0;
    Standardizer standardizer;
    SpectralBandSpec bands;
    nlohmann::json hyperparams;
    std::variant<KnnModel, SvmModel, RandomForest, GradientBoosting, NeuralNet> payload;
};

// Trainers following Table-1 hyperparameters. Each standardizes the
// features, fits on the given rows, and stamps the artifact.
ModelArtifact fit_knn(const Dataset& train, std::uint64_t seed, const KnnParams& params = {},
                      const SpectralBandSpec& bands = SpectralBandSpec::log_bands(18000.0));
ModelArtifact fit_svm(const Dataset& train, std::uint64_t seed, const SvmParams& params = {},
                      const SpectralBandSpec& bands = SpectralBandSpec::log_bands(18000.0));
ModelArtifact fit_rf(const Dataset& train, std::uint64_t seed, const RfParams& params = {},
                     const SpectralBandSpec& bands = SpectralBandSpec::log_bands(18000.0));
ModelArtifact fit_gb(const Dataset& train, std::uint64_t seed, const GbParams& params = {},
                     const SpectralBandSpec& bands = SpectralBandSpec::log_bands(18000.0));
ModelArtifact fit_ann(const Dataset& train, std::uint64_t seed, const AnnParams& params = {},
                      const SpectralBandSpec& bands = SpectralBandSpec::log_bands(18000.0));

ModelArtifact fit_model(Algo algo, const Dataset& train, std::uint64_t seed,
                        const SpectralBandSpec& bands = SpectralBandSpec::log_bands(18000.0));

/// Applies the stored standardizer and runs the payload. Throws SchemaError
/// on non-finite inputs or schema mismatches.
TerrainClass predict(const ModelArtifact& model, const FeatureVector& fv);
TerrainClass predict(const ModelArtifact& model, std::span<const double> values);

/// Runs a payload on an already-standardized row; returns the class code.
int payload_predict(const decltype(ModelArtifact::payload)& payload,
                    std::span<const double> standardized_row);

/// Feature rows as a matrix plus class codes, optionally restricted to a
/// column subset (used by the sensor-ablation harness).
std::pair<Matrix, std::vector<int>> dataset_matrix(const Dataset& ds,
                                                   std::span<const std::size_t> columns = {});

void save_model(const ModelArtifact& model, const std::string& path);
ModelArtifact load_model(const std::string& path);

nlohmann::json model_to_json(const ModelArtifact& model);
ModelArtifact model_from_json(const nlohmann::json& j);

}  // namespace terrastep
