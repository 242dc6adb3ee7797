#pragma once

#include <cstdint>
#include <utility>

#include "terrastep/types.hpp"

namespace terrastep {

/// Stratified train/test split. Per class, the test row count is
/// round(class_count * test_fraction); rows are assigned by a seeded shuffle
/// within each class, so the partition is deterministic given the seed.
/// Requires 0 < test_fraction < 1, a non-empty dataset, and >= 2 rows in
/// every present class.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed);

}  // namespace terrastep
