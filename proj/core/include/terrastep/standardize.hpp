#pragma once

#include <span>
#include <vector>

#include "terrastep/matrix.hpp"

namespace terrastep {

/// Per-feature (mean, std) from training data, applied identically at train
/// and predict time. A constant feature gets its std clamped to 1 so the
/// transform never divides by zero.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stdev;

    static Standardizer fit(const Matrix& x);

    void apply_in_place(Matrix& x) const;
    std::vector<double> apply(std::span<const double> row) const;

    std::size_t size() const { return mean.size(); }
};

}  // namespace terrastep
