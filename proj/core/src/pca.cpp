#include "terrastep/pca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "terrastep/features.hpp"
#include "terrastep/io.hpp"
#include "terrastep/standardize.hpp"

namespace terrastep {

std::pair<std::vector<double>, Matrix> symmetric_eigen(const Matrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("symmetric_eigen: matrix must be square");
    const std::size_t n = m.rows;
    Matrix a = m;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

    // cyclic Jacobi sweeps; rotations kill one off-diagonal pair at a time
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
        if (off < 1e-24 * (1.0 + std::abs(a.at(0, 0)))) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v.at(k, p), vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * vkq;
                    v.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a.at(i, i);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return diag[l] != diag[r] ? diag[l] > diag[r] : l < r;
    });

    std::vector<double> eigenvalues(n);
    Matrix vectors(n, n);  // rows are eigenvectors
    for (std::size_t i = 0; i < n; ++i) {
        eigenvalues[i] = diag[order[i]];
        // sign convention: largest-magnitude entry positive
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double val = std::abs(v.at(k, order[i]));
            if (val > best) {
                best = val;
                arg = k;
            }
        }
        const double sign = v.at(arg, order[i]) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) vectors.at(i, k) = sign * v.at(k, order[i]);
    }
    return {std::move(eigenvalues), std::move(vectors)};
}

PcaResult pca_project(const Matrix& x, int dims) {
    if (dims < 1) throw std::invalid_argument("pca: dims must be >= 1");
    if (x.rows < static_cast<std::size_t>(dims))
        throw std::invalid_argument("pca: need at least dims rows");
    if (static_cast<std::size_t>(dims) > x.cols)
        throw std::invalid_argument("pca: dims exceeds feature count");

    const Standardizer standardizer = Standardizer::fit(x);
    Matrix z = x;
    standardizer.apply_in_place(z);

    const std::size_t d = x.cols;
    Matrix cov(d, d);
    for (std::size_t r = 0; r < z.rows; ++r) {
        const auto row = z.row(r);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) cov.at(i, j) += row[i] * row[j];
    }
    const double denom = static_cast<double>(z.rows > 1 ? z.rows - 1 : 1);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            cov.at(i, j) /= denom;
            cov.at(j, i) = cov.at(i, j);
        }

    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) total += cov.at(i, i);
    if (total < 1e-24) {
        std::ostringstream msg;
        msg << "pca: dataset has zero variance; constant features:";
        for (std::size_t i = 0; i < d; ++i)
            if (cov.at(i, i) < 1e-24) msg << ' ' << i;
        throw std::invalid_argument(msg.str());
    }

    auto [eigenvalues, vectors] = symmetric_eigen(cov);

    PcaResult out;
    out.mean = standardizer.mean;
    out.scale = standardizer.stdev;
    out.total_variance = total;
    out.explained_variance.assign(eigenvalues.begin(), eigenvalues.begin() + dims);
    out.components = Matrix(static_cast<std::size_t>(dims), d);
    for (int k = 0; k < dims; ++k)
        std::copy(vectors.row(k).begin(), vectors.row(k).end(), out.components.row(k).begin());

    out.projected = Matrix(z.rows, static_cast<std::size_t>(dims));
    for (std::size_t r = 0; r < z.rows; ++r)
        for (int k = 0; k < dims; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += z.at(r, j) * out.components.at(k, j);
            out.projected.at(r, static_cast<std::size_t>(k)) = acc;
        }
    return out;
}

PcaResult pca_project(const Dataset& ds, int dims) {
    if (ds.empty()) throw std::invalid_argument("pca: empty dataset");
    Matrix x(ds.rows.size(), kFeatureCount);
    for (std::size_t r = 0; r < ds.rows.size(); ++r)
        std::copy(ds.rows[r].values.begin(), ds.rows[r].values.end(), x.row(r).begin());
    return pca_project(x, dims);
}

void save_pca_csv(const PcaResult& pca, const Dataset& ds, const std::string& path) {
    if (pca.projected.rows != ds.rows.size())
        throw std::invalid_argument("save_pca_csv: row count mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path);
    for (std::size_t k = 0; k < pca.projected.cols; ++k) out << "pc" << (k + 1) << ',';
    out << "label\n";
    for (std::size_t r = 0; r < pca.projected.rows; ++r) {
        for (std::size_t k = 0; k < pca.projected.cols; ++k)
            out << detail::format_double(pca.projected.at(r, k)) << ',';
        out << (ds.rows[r].label ? terrain_name(*ds.rows[r].label) : "UNKNOWN") << '\n';
    }
}

}  // namespace terrastep
