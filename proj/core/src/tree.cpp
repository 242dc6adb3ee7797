#include "terrastep/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace terrastep {

using nlohmann::json;

double gini_impurity(std::span<const std::size_t> class_counts) {
    std::size_t total = 0;
    for (std::size_t c : class_counts) total += c;
    if (total == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        acc += p * p;
    }
    return 1.0 - acc;
}

double DecisionTree::predict(std::span<const double> row) const {
    int id = 0;
    while (nodes[id].feature >= 0)
        id = row[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
    return nodes[id].value;
}

json DecisionTree::to_json() const {
    json feats = json::array(), thrs = json::array(), lefts = json::array(),
         rights = json::array(), values = json::array();
    for (const TreeNode& n : nodes) {
        feats.push_back(n.feature);
        thrs.push_back(n.threshold);
        lefts.push_back(n.left);
        rights.push_back(n.right);
        values.push_back(n.value);
    }
    return json{{"feature", feats}, {"threshold", thrs}, {"left", lefts},
                {"right", rights}, {"value", values}};
}

DecisionTree DecisionTree::from_json(const json& j) {
    DecisionTree t;
    const auto feats = j.at("feature").get<std::vector<int>>();
    const auto thrs = j.at("threshold").get<std::vector<double>>();
    const auto lefts = j.at("left").get<std::vector<int>>();
    const auto rights = j.at("right").get<std::vector<int>>();
    const auto values = j.at("value").get<std::vector<double>>();
    t.nodes.resize(feats.size());
    for (std::size_t i = 0; i < feats.size(); ++i)
        t.nodes[i] = {feats[i], thrs[i], lefts[i], rights[i], values[i]};
    return t;
}

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

// Shared scaffolding for both tree kinds: rows are index ranges into one
// vector, partitioned in place as nodes split.
struct Builder {
    const Matrix& x;
    std::vector<std::size_t> rows;
    std::vector<TreeNode> nodes;
    std::vector<std::pair<double, std::size_t>> scratch;

    explicit Builder(const Matrix& m, std::span<const std::size_t> sample_rows)
        : x(m), rows(sample_rows.begin(), sample_rows.end()) {}

    void sort_by_feature(std::size_t begin, std::size_t end, int feature) {
        scratch.clear();
        for (std::size_t i = begin; i < end; ++i)
            scratch.emplace_back(x.at(rows[i], feature), rows[i]);
        std::sort(scratch.begin(), scratch.end());
    }

    std::size_t partition(std::size_t begin, std::size_t end, int feature, double threshold) {
        const auto mid = std::stable_partition(
            rows.begin() + static_cast<long>(begin), rows.begin() + static_cast<long>(end),
            [&](std::size_t r) { return x.at(r, feature) <= threshold; });
        return static_cast<std::size_t>(mid - rows.begin());
    }
};

// --- classification ---

struct GiniBuilder : Builder {
    std::span<const int> y;
    int n_classes;
    int max_depth;
    int max_features;
    Rng& rng;
    std::vector<int> feature_pool;

    GiniBuilder(const Matrix& m, std::span<const int> labels,
                std::span<const std::size_t> sample_rows, int classes, int depth, int feats,
                Rng& r)
        : Builder(m, sample_rows), y(labels), n_classes(classes), max_depth(depth),
          max_features(feats), rng(r) {
        feature_pool.resize(x.cols);
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
    }

    int majority(std::size_t begin, std::size_t end) const {
        std::vector<std::size_t> counts(n_classes, 0);
        for (std::size_t i = begin; i < end; ++i) ++counts[y[rows[i]]];
        int best = 0;
        for (int c = 1; c < n_classes; ++c)
            if (counts[c] > counts[best]) best = c;
        return best;
    }

    bool pure(std::size_t begin, std::size_t end) const {
        for (std::size_t i = begin + 1; i < end; ++i)
            if (y[rows[i]] != y[rows[begin]]) return false;
        return true;
    }

    SplitChoice best_split_on(std::size_t begin, std::size_t end, int feature) {
        sort_by_feature(begin, end, feature);
        const std::size_t n = end - begin;
        std::vector<std::size_t> left(n_classes, 0), right(n_classes, 0);
        for (const auto& [v, r] : scratch) ++right[y[r]];

        SplitChoice best;
        double left_sq = 0.0;
        double right_sq = 0.0;
        for (std::size_t c = 0; c < static_cast<std::size_t>(n_classes); ++c)
            right_sq += static_cast<double>(right[c]) * static_cast<double>(right[c]);

        for (std::size_t i = 0; i + 1 < n; ++i) {
            const int cls = y[scratch[i].second];
            // incremental sum of squared counts for O(1) gini updates
            left_sq += 2.0 * static_cast<double>(left[cls]) + 1.0;
            right_sq -= 2.0 * static_cast<double>(right[cls]) - 1.0;
            ++left[cls];
            --right[cls];
            if (scratch[i].first == scratch[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(n - i - 1);
            const double score = (nl - left_sq / nl) + (nr - right_sq / nr);
            if (score < best.score) {
                best.score = score;
                best.feature = feature;
                best.threshold = scratch[i].first + 0.5 * (scratch[i + 1].first - scratch[i].first);
            }
        }
        return best;
    }

    SplitChoice choose_split(std::size_t begin, std::size_t end) {
        const int d = static_cast<int>(x.cols);
        SplitChoice best;
        if (max_features > 0 && max_features < d) {
            // partial Fisher-Yates draw of candidate features
            for (int i = 0; i < max_features; ++i) {
                const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(d - i)));
                std::swap(feature_pool[i], feature_pool[j]);
            }
            for (int i = 0; i < max_features; ++i) {
                const SplitChoice cand = best_split_on(begin, end, feature_pool[i]);
                if (cand.score < best.score) best = cand;
            }
            if (best.feature >= 0) return best;
            // the sampled candidates were all constant: fall back to a full
            // scan so an impure node still splits whenever any feature can
        }
        for (int f = 0; f < d; ++f) {
            const SplitChoice cand = best_split_on(begin, end, f);
            if (cand.score < best.score) best = cand;
        }
        return best;
    }

    int build(std::size_t begin, std::size_t end, int depth) {
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({});
        if (pure(begin, end) || (max_depth >= 0 && depth >= max_depth)) {
            nodes[id].value = majority(begin, end);
            return id;
        }
        const SplitChoice split = choose_split(begin, end);
        if (split.feature < 0) {
            nodes[id].value = majority(begin, end);
            return id;
        }
        const std::size_t mid = partition(begin, end, split.feature, split.threshold);
        if (mid == begin || mid == end) {
            nodes[id].value = majority(begin, end);
            return id;
        }
        nodes[id].feature = split.feature;
        nodes[id].threshold = split.threshold;
        const int left = build(begin, mid, depth + 1);
        const int right = build(mid, end, depth + 1);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }
};

// --- regression ---

struct MseBuilder : Builder {
    std::span<const double> target;
    int max_depth;
    const std::function<double(std::span<const std::size_t>)>& leaf_value;

    MseBuilder(const Matrix& m, std::span<const double> t,
               std::span<const std::size_t> sample_rows, int depth,
               const std::function<double(std::span<const std::size_t>)>& lv)
        : Builder(m, sample_rows), target(t), max_depth(depth), leaf_value(lv) {}

    SplitChoice best_split_on(std::size_t begin, std::size_t end, int feature) {
        sort_by_feature(begin, end, feature);
        const std::size_t n = end - begin;
        double right_sum = 0.0;
        for (const auto& [v, r] : scratch) right_sum += target[r];
        double left_sum = 0.0;

        SplitChoice best;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += target[scratch[i].second];
            right_sum -= target[scratch[i].second];
            if (scratch[i].first == scratch[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(n - i - 1);
            // minimizing SSE == maximizing sum^2/n of the two sides
            const double score = -(left_sum * left_sum / nl + right_sum * right_sum / nr);
            if (score < best.score) {
                best.score = score;
                best.feature = feature;
                best.threshold = scratch[i].first + 0.5 * (scratch[i + 1].first - scratch[i].first);
            }
        }
        return best;
    }

    int build(std::size_t begin, std::size_t end, int depth) {
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({});
        if (end - begin < 2 || (max_depth >= 0 && depth >= max_depth)) {
            nodes[id].value = leaf_value({rows.data() + begin, end - begin});
            return id;
        }
        SplitChoice best;
        for (int f = 0; f < static_cast<int>(x.cols); ++f) {
            const SplitChoice cand = best_split_on(begin, end, f);
            if (cand.score < best.score) best = cand;
        }
        if (best.feature < 0) {
            nodes[id].value = leaf_value({rows.data() + begin, end - begin});
            return id;
        }
        const std::size_t mid = partition(begin, end, best.feature, best.threshold);
        if (mid == begin || mid == end) {
            nodes[id].value = leaf_value({rows.data() + begin, end - begin});
            return id;
        }
        nodes[id].feature = best.feature;
        nodes[id].threshold = best.threshold;
        const int left = build(begin, mid, depth + 1);
        const int right = build(mid, end, depth + 1);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }
};

}  // namespace

DecisionTree fit_classification_tree(const Matrix& x, std::span<const int> y,
                                     std::span<const std::size_t> sample_rows, int n_classes,
                                     int max_depth, int max_features, Rng& rng) {
    if (sample_rows.empty()) throw std::invalid_argument("fit_classification_tree: no rows");
    GiniBuilder b(x, y, sample_rows, n_classes, max_depth, max_features, rng);
    b.build(0, b.rows.size(), 0);
    DecisionTree t;
    t.nodes = std::move(b.nodes);
    return t;
}

DecisionTree fit_regression_tree(const Matrix& x, std::span<const double> target,
                                 std::span<const std::size_t> sample_rows, int max_depth,
                                 const std::function<double(std::span<const std::size_t>)>& leaf_value) {
    if (sample_rows.empty()) throw std::invalid_argument("fit_regression_tree: no rows");
    MseBuilder b(x, target, sample_rows, max_depth, leaf_value);
    b.build(0, b.rows.size(), 0);
    DecisionTree t;
    t.nodes = std::move(b.nodes);
    return t;
}

}  // namespace terrastep
