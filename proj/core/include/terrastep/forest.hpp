#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "terrastep/matrix.hpp"
#include "terrastep/tree.hpp"

namespace terrastep {

struct RfParams {
    int n_trees = 100;
    int max_depth = -1;  // unlimited
    // split criterion: Gini; sqrt(n_features) candidates per split
};

/// Bagged fully-grown CART trees; majority vote, ties to the lowest class
/// code. Per-tree seeds are derived from the training seed so trees could
/// be fit in parallel without changing the result.
class RandomForest {
public:
    static RandomForest fit(const Matrix& x, const std::vector<int>& y, const RfParams& params,
                            std::uint64_t seed);

    int predict(std::span<const double> query) const;
    std::vector<int> votes(std::span<const double> query) const;

    const std::vector<DecisionTree>& trees() const { return trees_; }

    nlohmann::json to_json() const;
    static RandomForest from_json(const nlohmann::json& j);

private:
    int n_classes_ = 0;
    std::vector<DecisionTree> trees_;
};

}  // namespace terrastep
