#pragma once

#include <string>
#include <utility>
#include <vector>

#include "terrastep/matrix.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

struct PcaResult {
    Matrix projected;                        // rows x dims
    std::vector<double> explained_variance;  // top eigenvalues, non-increasing
    Matrix components;                       // dims x n_features, orthonormal rows
    std::vector<double> mean, scale;         // standardization applied first
    double total_variance = 0.0;             // trace of the covariance
};

/// Projects standardized features onto the top `dims` eigenvectors of their
/// covariance (divisor n-1). Eigenvector signs are fixed by making each
/// one's largest-magnitude entry positive. Throws on rows < dims or on a
/// dataset with zero total variance (the error lists the constant columns).
PcaResult pca_project(const Dataset& ds, int dims = 3);

/// Same projection for a raw matrix (used for sub-problems in tests).
PcaResult pca_project(const Matrix& x, int dims);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// rows of the returned matrix.
std::pair<std::vector<double>, Matrix> symmetric_eigen(const Matrix& m);

/// pca.csv with columns pc1..pcN,label.
void save_pca_csv(const PcaResult& pca, const Dataset& ds, const std::string& path);

}  // namespace terrastep
