#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "terrastep/matrix.hpp"

namespace terrastep {

struct SvmParams {
    double c = 1.0;          // soft-margin box constraint
    double kkt_tol = 1e-3;
    int max_passes = 500;    // examine-all sweeps before giving up
    // kernel: RBF with gamma = 1 / (n_features * mean feature variance)
};

/// RBF kernel over a fixed training matrix. Precomputes the full Gram
/// matrix when it fits in ~128 MB, otherwise computes rows on demand
/// through a small ring cache.
class RbfKernel {
public:
    RbfKernel(const Matrix& x, double gamma);

    double gamma() const { return gamma_; }
    std::size_t size() const { return x_.rows; }
    std::span<const double> row(std::size_t i) const;

private:
    const Matrix& x_;
    double gamma_;
    bool full_ = false;
    std::vector<double> gram_;
    mutable std::vector<double> cache_;        // cached rows, ring of slots
    mutable std::vector<int> cache_slot_row_;  // row held by each slot
    mutable std::vector<int> row_slot_;        // slot holding each row, -1 if none
    mutable std::size_t clock_ = 0;
};

namespace smo {

struct Result {
    std::vector<double> alpha;
    double bias = 0.0;
    int passes = 0;
    /// Dual objective after every successful pair update, when requested.
    std::vector<double> objective_trace;
};

/// Platt-style sequential minimal optimization of the binary soft-margin
/// dual. Labels must be +-1. Throws ConvergenceError (with pass/violation
/// diagnostics) when max_passes examine-all sweeps still leave KKT
/// violations.
Result solve(const RbfKernel& kernel, const std::vector<double>& y, double c, double tol,
             int max_passes, std::uint64_t seed, bool record_objective = false);

/// The dual objective sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij.
double dual_objective(const RbfKernel& kernel, const std::vector<double>& y,
                      const std::vector<double>& alpha);

}  // namespace smo

/// One-vs-rest RBF support vector machine (10 binary machines sharing one
/// kernel). Prediction is the argmax of the decision values.
class SvmModel {
public:
    static SvmModel fit(const Matrix& x, const std::vector<int>& y, const SvmParams& params,
                        std::uint64_t seed);

    int predict(std::span<const double> query) const;
    std::vector<double> decision_values(std::span<const double> query) const;

    double gamma() const { return gamma_; }

    nlohmann::json to_json() const;
    static SvmModel from_json(const nlohmann::json& j);

private:
    struct Machine {
        int class_code = 0;
        std::vector<int> sv;          // indices into support_points_
        std::vector<double> coeff;    // alpha_i * y_i per support vector
        double bias = 0.0;
    };

    double gamma_ = 0.0;
    Matrix support_points_;  // union of support vectors (standardized rows)
    std::vector<Machine> machines_;
};

}  // namespace terrastep
