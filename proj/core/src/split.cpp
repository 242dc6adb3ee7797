#include "terrastep/split.hpp"

#include <algorithm>
#include <cmath>

#include "terrastep/rng.hpp"

namespace terrastep {

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed) {
    if (ds.empty()) throw std::invalid_argument("split_train_test: empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("split_train_test: test_fraction must be in (0,1)");

    std::array<std::vector<std::size_t>, kNumTerrains> by_class;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        if (!ds.rows[i].label) throw std::invalid_argument("split_train_test: unlabeled row");
        by_class[static_cast<int>(*ds.rows[i].label)].push_back(i);
    }

    Rng rng(Rng::child_seed(seed, "split"));
    std::vector<bool> in_test(ds.rows.size(), false);
    for (int c = 0; c < kNumTerrains; ++c) {
        auto& rows = by_class[c];
        if (rows.empty()) continue;
        if (rows.size() < 2)
            throw std::invalid_argument("split_train_test: class " +
                                        std::string(terrain_name(static_cast<TerrainClass>(c))) +
                                        " has fewer than 2 rows");
        // Fisher-Yates with the shared stream; row order inside a class is
        // the dataset order, so the partition is a pure function of the seed.
        for (std::size_t i = rows.size() - 1; i > 0; --i)
            std::swap(rows[i], rows[rng.next_below(i + 1)]);
        const auto n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(rows.size()) * test_fraction));
        for (std::size_t i = 0; i < n_test; ++i) in_test[rows[i]] = true;
    }

    Dataset train, test;
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        (in_test[i] ? test : train).rows.push_back(ds.rows[i]);
    return {std::move(train), std::move(test)};
}

}  // namespace terrastep
