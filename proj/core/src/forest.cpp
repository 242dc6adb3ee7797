#include "terrastep/forest.hpp"

#include <cmath>
#include <stdexcept>

#include "terrastep/rng.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

using nlohmann::json;

RandomForest RandomForest::fit(const Matrix& x, const std::vector<int>& y, const RfParams& params,
                               std::uint64_t seed) {
    if (x.rows == 0) throw std::invalid_argument("rf: empty training set");
    if (x.rows != y.size()) throw std::invalid_argument("rf: row/label count mismatch");
    if (params.n_trees < 1) throw std::invalid_argument("rf: n_trees must be >= 1");

    RandomForest forest;
    forest.n_classes_ = kNumTerrains;
    const int max_features =
        std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(x.cols)))));

    forest.trees_.reserve(params.n_trees);
    std::vector<std::size_t> bag(x.rows);
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(Rng::child_seed(seed, "rf.tree." + std::to_string(t)));
        for (auto& r : bag) r = rng.next_below(x.rows);
        forest.trees_.push_back(fit_classification_tree(x, y, bag, forest.n_classes_,
                                                        params.max_depth, max_features, rng));
    }
    return forest;
}

std::vector<int> RandomForest::votes(std::span<const double> query) const {
    std::vector<int> counts(n_classes_, 0);
    for (const DecisionTree& t : trees_) ++counts[static_cast<int>(t.predict(query))];
    return counts;
}

int RandomForest::predict(std::span<const double> query) const {
    const std::vector<int> counts = votes(query);
    int best = 0;
    for (int c = 1; c < n_classes_; ++c)
        if (counts[c] > counts[best]) best = c;
    return best;
}

json RandomForest::to_json() const {
    json trees = json::array();
    for (const DecisionTree& t : trees_) trees.push_back(t.to_json());
    return json{{"n_classes", n_classes_}, {"trees", trees}};
}

RandomForest RandomForest::from_json(const json& j) {
    RandomForest f;
    f.n_classes_ = j.at("n_classes").get<int>();
    for (const auto& t : j.at("trees")) f.trees_.push_back(DecisionTree::from_json(t));
    if (f.trees_.empty()) throw SchemaError("rf payload: no trees");
    return f;
}

}  // namespace terrastep
