#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "terrastep/matrix.hpp"
#include "terrastep/tree.hpp"

namespace terrastep {

struct GbParams {
    double learning_rate = 0.1;
    int n_estimators = 100;
    int max_depth = 3;
    // loss: multinomial logistic (softmax deviance)
};

/// Multinomial gradient boosting: per stage, one depth-limited regression
/// tree per class is fit to the softmax residuals with Newton leaf steps.
/// Scores start at the class-prior log-odds, so learning_rate = 0 keeps the
/// prior prediction. Training cross-entropy is recorded per stage.
class GradientBoosting {
public:
    static GradientBoosting fit(const Matrix& x, const std::vector<int>& y, const GbParams& params,
                                std::uint64_t seed);

    int predict(std::span<const double> query) const;
    std::vector<double> scores(std::span<const double> query) const;

    /// Mean training cross-entropy after each stage; entry 0 is the
    /// prior-only loss.
    const std::vector<double>& staged_training_loss() const { return staged_loss_; }

    nlohmann::json to_json() const;
    static GradientBoosting from_json(const nlohmann::json& j);

private:
    double learning_rate_ = 0.1;
    std::vector<int> classes_;            // present class codes, ascending
    std::vector<double> prior_;           // log prior per present class
    std::vector<std::vector<DecisionTree>> stages_;  // [stage][class]
    std::vector<double> staged_loss_;
};

}  // namespace terrastep
