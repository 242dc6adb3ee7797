#include "terrastep/standardize.hpp"

#include <cmath>
#include <stdexcept>

namespace terrastep {

Standardizer Standardizer::fit(const Matrix& x) {
    if (x.rows == 0) throw std::invalid_argument("Standardizer: empty matrix");
    Standardizer s;
    s.mean.assign(x.cols, 0.0);
    s.stdev.assign(x.cols, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r)
        for (std::size_t c = 0; c < x.cols; ++c) s.mean[c] += x.at(r, c);
    for (double& m : s.mean) m /= static_cast<double>(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r)
        for (std::size_t c = 0; c < x.cols; ++c) {
            const double d = x.at(r, c) - s.mean[c];
            s.stdev[c] += d * d;
        }
    for (double& v : s.stdev) {
        v = std::sqrt(v / static_cast<double>(x.rows));
        if (v < 1e-12) v = 1.0;  // constant feature, leave it centered
    }
    return s;
}

void Standardizer::apply_in_place(Matrix& x) const {
    if (x.cols != mean.size()) throw std::invalid_argument("Standardizer: width mismatch");
    for (std::size_t r = 0; r < x.rows; ++r)
        for (std::size_t c = 0; c < x.cols; ++c)
            x.at(r, c) = (x.at(r, c) - mean[c]) / stdev[c];
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
    if (row.size() != mean.size()) throw std::invalid_argument("Standardizer: width mismatch");
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - mean[c]) / stdev[c];
    return out;
}

}  // namespace terrastep
