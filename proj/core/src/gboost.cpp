#include "terrastep/gboost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "terrastep/rng.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

using nlohmann::json;

namespace {

// softmax rows of scores[sample][class], in place -> probabilities
void softmax_rows(std::vector<std::vector<double>>& scores) {
    for (auto& row : scores) {
        const double mx = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (double& v : row) {
            v = std::exp(v - mx);
            total += v;
        }
        for (double& v : row) v /= total;
    }
}

}  // namespace

GradientBoosting GradientBoosting::fit(const Matrix& x, const std::vector<int>& y,
                                       const GbParams& params, std::uint64_t seed) {
    (void)seed;  // training is fully deterministic; kept for interface symmetry
    if (x.rows == 0) throw std::invalid_argument("gb: empty training set");
    if (x.rows != y.size()) throw std::invalid_argument("gb: row/label count mismatch");
    if (params.n_estimators < 1) throw std::invalid_argument("gb: n_estimators must be >= 1");
    if (params.learning_rate < 0.0) throw std::invalid_argument("gb: negative learning rate");

    GradientBoosting gb;
    gb.learning_rate_ = params.learning_rate;

    // class list restricted to present codes, ascending
    std::array<std::size_t, kNumTerrains> counts{};
    for (int label : y) {
        if (label < 0 || label >= kNumTerrains) throw std::invalid_argument("gb: label out of range");
        ++counts[label];
    }
    for (int c = 0; c < kNumTerrains; ++c)
        if (counts[c] > 0) gb.classes_.push_back(c);
    const std::size_t k = gb.classes_.size();

    std::vector<int> class_pos(kNumTerrains, -1);
    for (std::size_t i = 0; i < k; ++i) class_pos[gb.classes_[i]] = static_cast<int>(i);

    gb.prior_.resize(k);
    for (std::size_t i = 0; i < k; ++i)
        gb.prior_[i] = std::log(static_cast<double>(counts[gb.classes_[i]]) /
                                static_cast<double>(x.rows));

    const std::size_t n = x.rows;
    std::vector<std::vector<double>> scores(n, gb.prior_);
    std::vector<std::vector<double>> prob;

    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);

    auto record_loss = [&] {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = scores[i];
            const double mx = *std::max_element(row.begin(), row.end());
            double total = 0.0;
            for (double v : row) total += std::exp(v - mx);
            loss -= row[class_pos[y[i]]] - mx - std::log(total);
        }
        gb.staged_loss_.push_back(loss / static_cast<double>(n));
    };
    record_loss();  // prior-only baseline

    const double newton_scale = k > 1 ? (static_cast<double>(k) - 1.0) / static_cast<double>(k) : 0.0;
    std::vector<double> residual(n);

    for (int stage = 0; stage < params.n_estimators; ++stage) {
        prob = scores;
        softmax_rows(prob);

        std::vector<DecisionTree> stage_trees;
        stage_trees.reserve(k);
        for (std::size_t ci = 0; ci < k; ++ci) {
            for (std::size_t i = 0; i < n; ++i)
                residual[i] = (y[i] == gb.classes_[ci] ? 1.0 : 0.0) - prob[i][ci];

            auto leaf_value = [&](std::span<const std::size_t> rows) {
                double num = 0.0, den = 0.0;
                for (std::size_t r : rows) {
                    num += residual[r];
                    den += std::abs(residual[r]) * (1.0 - std::abs(residual[r]));
                }
                if (den < 1e-150) return 0.0;
                return newton_scale * num / den;
            };
            stage_trees.push_back(
                fit_regression_tree(x, residual, all_rows, params.max_depth, leaf_value));
        }

        for (std::size_t ci = 0; ci < k; ++ci)
            for (std::size_t i = 0; i < n; ++i)
                scores[i][ci] += params.learning_rate * stage_trees[ci].predict(x.row(i));

        gb.stages_.push_back(std::move(stage_trees));
        record_loss();
    }
    return gb;
}

std::vector<double> GradientBoosting::scores(std::span<const double> query) const {
    std::vector<double> s = prior_;
    for (const auto& stage : stages_)
        for (std::size_t ci = 0; ci < stage.size(); ++ci)
            s[ci] += learning_rate_ * stage[ci].predict(query);
    return s;
}

int GradientBoosting::predict(std::span<const double> query) const {
    const std::vector<double> s = scores(query);
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] > s[best]) best = i;  // ties fall to the lowest class code
    return classes_[best];
}

json GradientBoosting::to_json() const {
    json stages = json::array();
    for (const auto& stage : stages_) {
        json trees = json::array();
        for (const DecisionTree& t : stage) trees.push_back(t.to_json());
        stages.push_back(trees);
    }
    return json{{"learning_rate", learning_rate_},
                {"classes", classes_},
                {"prior", prior_},
                {"stages", stages},
                {"staged_loss", staged_loss_}};
}

GradientBoosting GradientBoosting::from_json(const json& j) {
    GradientBoosting gb;
    gb.learning_rate_ = j.at("learning_rate").get<double>();
    gb.classes_ = j.at("classes").get<std::vector<int>>();
    gb.prior_ = j.at("prior").get<std::vector<double>>();
    gb.staged_loss_ = j.at("staged_loss").get<std::vector<double>>();
    for (const auto& stage : j.at("stages")) {
        std::vector<DecisionTree> trees;
        for (const auto& t : stage) trees.push_back(DecisionTree::from_json(t));
        gb.stages_.push_back(std::move(trees));
    }
    if (gb.classes_.empty() || gb.classes_.size() != gb.prior_.size())
        throw SchemaError("gb payload: class/prior mismatch");
    return gb;
}

}  // namespace terrastep
