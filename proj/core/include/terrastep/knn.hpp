#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "terrastep/matrix.hpp"

namespace terrastep {

struct KnnParams {
    int k = 10;
    int leaf_size = 30;
    double minkowski_p = 2.0;
    // weights: uniform (majority vote)
};

/// k-nearest-neighbor classifier over a kd-tree. Split dimension is the
/// widest-spread feature at each node; points are ordered by (value, row)
/// so the tree is deterministic. Equal query distances are broken by row
/// index, vote ties by lowest class code.
class KnnModel {
public:
    static KnnModel fit(Matrix points, std::vector<int> labels, const KnnParams& params);

    int predict(std::span<const double> query) const;

    /// The k nearest training rows as (distance, row) pairs, sorted by
    /// (distance, row). Exposed so tests can compare against brute force.
    std::vector<std::pair<double, int>> k_nearest(std::span<const double> query, int k) const;

    const KnnParams& params() const { return params_; }
    std::size_t size() const { return points_.rows; }

    nlohmann::json to_json() const;
    static KnnModel from_json(const nlohmann::json& j);

private:
    struct Node {
        int axis = -1;          // -1 for leaves
        double threshold = 0.0;
        int left = -1, right = -1;
        int begin = 0, end = 0;  // range into order_
    };

    void build();
    int build_node(int begin, int end);
    void search(int node, std::span<const double> query,
                std::vector<std::pair<double, int>>& best, std::size_t k) const;
    double distance(std::span<const double> a, std::span<const double> b) const;

    KnnParams params_;
    Matrix points_;
    std::vector<int> labels_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace terrastep
