#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "terrastep/matrix.hpp"
#include "terrastep/rng.hpp"

namespace terrastep {

/// 1 - sum(p_k^2) over class proportions.
double gini_impurity(std::span<const std::size_t> class_counts);

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;  // leaf payload: class code or regression value
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> row) const;
    bool empty() const { return nodes.empty(); }

    nlohmann::json to_json() const;
    static DecisionTree from_json(const nlohmann::json& j);
};

/// CART classification tree, Gini impurity, thresholds at midpoints of
/// adjacent sorted values. max_features > 0 samples that many split
/// candidates per node (falling back to a full scan when none of them
/// separate); max_depth < 0 grows until pure or unsplittable.
DecisionTree fit_classification_tree(const Matrix& x, std::span<const int> y,
                                     std::span<const std::size_t> sample_rows, int n_classes,
                                     int max_depth, int max_features, Rng& rng);

/// CART regression tree on squared error. leaf_value maps the rows ending
/// in a leaf to its payload (gradient boosting installs its Newton step).
DecisionTree fit_regression_tree(const Matrix& x, std::span<const double> target,
                                 std::span<const std::size_t> sample_rows, int max_depth,
                                 const std::function<double(std::span<const std::size_t>)>& leaf_value);

}  // namespace terrastep
