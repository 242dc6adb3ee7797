#include "terrastep/knn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "terrastep/types.hpp"

namespace terrastep {

using nlohmann::json;

KnnModel KnnModel::fit(Matrix points, std::vector<int> labels, const KnnParams& params) {
    if (points.rows == 0) throw std::invalid_argument("knn: empty training set");
    if (points.rows != labels.size()) throw std::invalid_argument("knn: row/label count mismatch");
    if (params.k < 1 || static_cast<std::size_t>(params.k) > points.rows)
        throw std::invalid_argument("knn: k must be in [1, n_train]");
    if (params.leaf_size < 1) throw std::invalid_argument("knn: leaf_size must be >= 1");

    KnnModel m;
    m.params_ = params;
    m.points_ = std::move(points);
    m.labels_ = std::move(labels);
    m.build();
    return m;
}

void KnnModel::build() {
    order_.resize(points_.rows);
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    nodes_.clear();
    root_ = build_node(0, static_cast<int>(order_.size()));
}

int KnnModel::build_node(int begin, int end) {
    Node node;
    node.begin = begin;
    node.end = end;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    if (end - begin <= params_.leaf_size) return id;

    // split on the widest-spread feature; sort by (value, row) so the
    // layout is deterministic under ties
    int axis = 0;
    double best_spread = -1.0;
    for (std::size_t c = 0; c < points_.cols; ++c) {
        double lo = points_.at(order_[begin], c), hi = lo;
        for (int i = begin + 1; i < end; ++i) {
            const double v = points_.at(order_[i], c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = static_cast<int>(c);
        }
    }
    if (best_spread <= 0.0) return id;  // all points identical: leaf

    std::sort(order_.begin() + begin, order_.begin() + end, [&](int a, int b) {
        const double va = points_.at(a, axis), vb = points_.at(b, axis);
        return va != vb ? va < vb : a < b;
    });
    const int mid = begin + (end - begin) / 2;

    nodes_[id].axis = axis;
    nodes_[id].threshold = points_.at(order_[mid], axis);
    const int left = build_node(begin, mid);
    const int right = build_node(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

double KnnModel::distance(std::span<const double> a, std::span<const double> b) const {
    if (params_.minkowski_p == 2.0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::pow(std::abs(a[i] - b[i]), params_.minkowski_p);
    return std::pow(acc, 1.0 / params_.minkowski_p);
}

void KnnModel::search(int node_id, std::span<const double> query,
                      std::vector<std::pair<double, int>>& best, std::size_t k) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int row = order_[i];
            const std::pair<double, int> cand{distance(query, points_.row(row)), row};
            if (best.size() < k) {
                best.push_back(cand);
                std::push_heap(best.begin(), best.end());
            } else if (cand < best.front()) {
                std::pop_heap(best.begin(), best.end());
                best.back() = cand;
                std::push_heap(best.begin(), best.end());
            }
        }
        return;
    }

    const double delta = query[node.axis] - node.threshold;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, query, best, k);
    // the far half-space is no closer than |delta| along the split axis
    if (best.size() < k || std::abs(delta) <= best.front().first) search(far, query, best, k);
}

std::vector<std::pair<double, int>> KnnModel::k_nearest(std::span<const double> query,
                                                        int k) const {
    if (query.size() != points_.cols) throw SchemaError("knn: query width mismatch");
    if (k < 1 || static_cast<std::size_t>(k) > points_.rows)
        throw std::invalid_argument("knn: k out of range");
    std::vector<std::pair<double, int>> best;
    best.reserve(static_cast<std::size_t>(k) + 1);
    search(root_, query, best, static_cast<std::size_t>(k));
    std::sort(best.begin(), best.end());
    return best;
}

int KnnModel::predict(std::span<const double> query) const {
    const auto neighbors = k_nearest(query, params_.k);
    std::array<int, kNumTerrains> votes{};
    for (const auto& [dist, row] : neighbors) ++votes[labels_[row]];
    int best = 0;
    for (int c = 1; c < kNumTerrains; ++c)
        if (votes[c] > votes[best]) best = c;  // ties fall to the lowest code
    return best;
}

json KnnModel::to_json() const {
    json j;
    j["k"] = params_.k;
    j["leaf_size"] = params_.leaf_size;
    j["minkowski_p"] = params_.minkowski_p;
    j["rows"] = points_.rows;
    j["cols"] = points_.cols;
    j["points"] = points_.data;
    j["labels"] = labels_;
    return j;
}

KnnModel KnnModel::from_json(const json& j) {
    KnnParams params;
    params.k = j.at("k").get<int>();
    params.leaf_size = j.at("leaf_size").get<int>();
    params.minkowski_p = j.at("minkowski_p").get<double>();
    Matrix points;
    points.rows = j.at("rows").get<std::size_t>();
    points.cols = j.at("cols").get<std::size_t>();
    points.data = j.at("points").get<std::vector<double>>();
    if (points.data.size() != points.rows * points.cols)
        throw SchemaError("knn payload: points size mismatch");
    return fit(std::move(points), j.at("labels").get<std::vector<int>>(), params);
}

}  // namespace terrastep
