#include "terrastep/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "terrastep/rng.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

using nlohmann::json;

namespace {

constexpr std::size_t kFullGramLimit = 4000;  // n*n doubles <= ~128 MB
constexpr std::size_t kRowCacheSlots = 64;
constexpr double kAlphaEps = 1e-12;

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::exp(-gamma * acc);
}

}  // namespace

RbfKernel::RbfKernel(const Matrix& x, double gamma) : x_(x), gamma_(gamma) {
    const std::size_t n = x.rows;
    if (n <= kFullGramLimit) {
        full_ = true;
        gram_.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            gram_[i * n + i] = 1.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double k = rbf(x.row(i), x.row(j), gamma_);
                gram_[i * n + j] = k;
                gram_[j * n + i] = k;
            }
        }
    } else {
        cache_.resize(kRowCacheSlots * n);
        cache_slot_row_.assign(kRowCacheSlots, -1);
        row_slot_.assign(n, -1);
    }
}

std::span<const double> RbfKernel::row(std::size_t i) const {
    const std::size_t n = x_.rows;
    if (full_) return {gram_.data() + i * n, n};
    if (row_slot_[i] >= 0)
        return {cache_.data() + static_cast<std::size_t>(row_slot_[i]) * n, n};
    const std::size_t slot = clock_++ % kRowCacheSlots;
    if (cache_slot_row_[slot] >= 0) row_slot_[cache_slot_row_[slot]] = -1;
    cache_slot_row_[slot] = static_cast<int>(i);
    row_slot_[i] = static_cast<int>(slot);
    double* dst = cache_.data() + slot * n;
    for (std::size_t j = 0; j < n; ++j) dst[j] = rbf(x_.row(i), x_.row(j), gamma_);
    dst[i] = 1.0;
    return {dst, n};
}

namespace smo {

double dual_objective(const RbfKernel& kernel, const std::vector<double>& y,
                      const std::vector<double>& alpha) {
    const std::size_t n = alpha.size();
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += alpha[i];
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] <= kAlphaEps) continue;
        const auto ki = kernel.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (alpha[j] > kAlphaEps) acc += alpha[j] * y[j] * ki[j];
        obj -= 0.5 * alpha[i] * y[i] * acc;
    }
    return obj;
}

namespace {

struct Solver {
    const RbfKernel& kernel;
    const std::vector<double>& y;
    double c, tol;
    Rng rng;
    std::vector<double> alpha, error;  // error[i] = f(x_i) - y_i
    double bias = 0.0;
    std::vector<double>* trace = nullptr;
    Result* result = nullptr;

    Solver(const RbfKernel& k, const std::vector<double>& labels, double c_, double tol_,
           std::uint64_t seed)
        : kernel(k), y(labels), c(c_), tol(tol_), rng(seed) {
        alpha.assign(y.size(), 0.0);
        error.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) error[i] = -y[i];  // f = 0 initially
    }

    bool non_bound(std::size_t i) const { return alpha[i] > kAlphaEps && alpha[i] < c - kAlphaEps; }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha[i1], a2 = alpha[i2];
        const double y1 = y[i1], y2 = y[i2];
        const double e1 = error[i1], e2 = error[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c, c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c);
            hi = std::min(c, a1 + a2);
        }
        if (lo >= hi) return false;

        const auto k1 = kernel.row(i1);
        const auto k2 = kernel.row(i2);
        const double k11 = k1[i1], k12 = k1[i2], k22 = k2[i2];
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // flat direction: evaluate the pair objective at both clip ends
            const double f1 = e1 + y1, f2 = e2 + y2;
            const double v1 = f1 - bias - a1 * y1 * k11 - a2 * y2 * k12;
            const double v2 = f2 - bias - a1 * y1 * k12 - a2 * y2 * k22;
            auto pair_obj = [&](double t2) {
                const double t1 = a1 + s * (a2 - t2);
                return t1 + t2 - 0.5 * k11 * t1 * t1 - 0.5 * k22 * t2 * t2 - s * k12 * t1 * t2 -
                       y1 * t1 * v1 - y2 * t2 * v2;
            };
            const double obj_lo = pair_obj(lo), obj_hi = pair_obj(hi);
            if (obj_lo > obj_hi + 1e-12)
                a2_new = lo;
            else if (obj_hi > obj_lo + 1e-12)
                a2_new = hi;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;

        const double a1_new = a1 + s * (a2 - a2_new);
        const double d1 = y1 * (a1_new - a1), d2 = y2 * (a2_new - a2);

        const double b1 = bias - e1 - d1 * k11 - d2 * k12;
        const double b2 = bias - e2 - d1 * k12 - d2 * k22;
        double bias_new;
        if (a1_new > kAlphaEps && a1_new < c - kAlphaEps)
            bias_new = b1;
        else if (a2_new > kAlphaEps && a2_new < c - kAlphaEps)
            bias_new = b2;
        else
            bias_new = 0.5 * (b1 + b2);

        const double db = bias_new - bias;
        for (std::size_t i = 0; i < y.size(); ++i) error[i] += d1 * k1[i] + d2 * k2[i] + db;

        alpha[i1] = a1_new;
        alpha[i2] = a2_new;
        bias = bias_new;

        if (trace) trace->push_back(dual_objective(kernel, y, alpha));
        return true;
    }

    bool violates_kkt(std::size_t i) const {
        const double r = error[i] * y[i];
        return (r < -tol && alpha[i] < c - kAlphaEps) || (r > tol && alpha[i] > kAlphaEps);
    }

    bool examine(std::size_t i2) {
        if (!violates_kkt(i2)) return false;
        const std::size_t n = y.size();

        // second-choice heuristic: largest |E1 - E2| among non-bound points
        std::size_t best = n;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!non_bound(i)) continue;
            const double gap = std::abs(error[i] - error[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n && take_step(best, i2)) return true;

        const std::size_t offset = rng.next_below(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i1 = (k + offset) % n;
            if (non_bound(i1) && take_step(i1, i2)) return true;
        }
        const std::size_t offset2 = rng.next_below(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i1 = (k + offset2) % n;
            if (take_step(i1, i2)) return true;
        }
        return false;
    }

    Result run(int max_passes, std::vector<double>* objective_trace) {
        trace = objective_trace;
        const std::size_t n = y.size();
        bool examine_all = true;
        int changed = 0;
        int full_passes = 0;
        while (changed > 0 || examine_all) {
            changed = 0;
            if (examine_all) {
                if (++full_passes > max_passes) {
                    int violations = 0;
                    for (std::size_t i = 0; i < n; ++i)
                        if (violates_kkt(i)) ++violations;
                    throw ConvergenceError("smo: no convergence after " +
                                           std::to_string(max_passes) + " sweeps, " +
                                           std::to_string(violations) + " KKT violations at tol " +
                                           std::to_string(tol));
                }
                for (std::size_t i = 0; i < n; ++i) changed += examine(i) ? 1 : 0;
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    if (non_bound(i)) changed += examine(i) ? 1 : 0;
            }
            if (examine_all)
                examine_all = false;
            else if (changed == 0)
                examine_all = true;
        }
        Result res;
        res.alpha = std::move(alpha);
        res.bias = bias;
        res.passes = full_passes;
        if (objective_trace) res.objective_trace = std::move(*objective_trace);
        return res;
    }
};

}  // namespace

Result solve(const RbfKernel& kernel, const std::vector<double>& y, double c, double tol,
             int max_passes, std::uint64_t seed, bool record_objective) {
    if (y.size() != kernel.size()) throw std::invalid_argument("smo: label count mismatch");
    for (double v : y)
        if (v != 1.0 && v != -1.0) throw std::invalid_argument("smo: labels must be +-1");
    Solver solver(kernel, y, c, tol, seed);
    std::vector<double> trace;
    return solver.run(max_passes, record_objective ? &trace : nullptr);
}

}  // namespace smo

SvmModel SvmModel::fit(const Matrix& x, const std::vector<int>& y, const SvmParams& params,
                       std::uint64_t seed) {
    if (x.rows == 0) throw std::invalid_argument("svm: empty training set");
    if (x.rows != y.size()) throw std::invalid_argument("svm: row/label count mismatch");

    std::vector<int> classes;
    for (int label : y)
        if (std::find(classes.begin(), classes.end(), label) == classes.end())
            classes.push_back(label);
    std::sort(classes.begin(), classes.end());
    if (classes.size() < 2) throw std::invalid_argument("svm: need at least 2 classes");

    SvmModel model;
    // "scale" gamma: 1 / (n_features * mean feature variance)
    double total_var = 0.0;
    for (std::size_t col = 0; col < x.cols; ++col) {
        double mean = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) mean += x.at(r, col);
        mean /= static_cast<double>(x.rows);
        double var = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) {
            const double d = x.at(r, col) - mean;
            var += d * d;
        }
        total_var += var / static_cast<double>(x.rows);
    }
    const double mean_var = total_var / static_cast<double>(x.cols);
    model.gamma_ = 1.0 / (static_cast<double>(x.cols) * (mean_var > 1e-12 ? mean_var : 1.0));

    const RbfKernel kernel(x, model.gamma_);

    std::vector<std::vector<double>> machine_alpha_y;
    std::vector<double> machine_bias;
    std::vector<bool> used(x.rows, false);
    for (int cls : classes) {
        std::vector<double> labels(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) labels[i] = y[i] == cls ? 1.0 : -1.0;
        const smo::Result res =
            smo::solve(kernel, labels, params.c, params.kkt_tol, params.max_passes,
                       Rng::child_seed(seed, "svm.class." + std::to_string(cls)));
        std::vector<double> coeff(x.rows, 0.0);
        for (std::size_t i = 0; i < x.rows; ++i) {
            if (res.alpha[i] > kAlphaEps) {
                coeff[i] = res.alpha[i] * labels[i];
                used[i] = true;
            }
        }
        machine_alpha_y.push_back(std::move(coeff));
        machine_bias.push_back(res.bias);
    }

    // keep the union of support vectors once, machines reference into it
    std::vector<int> compact(x.rows, -1);
    std::size_t n_sv = 0;
    for (std::size_t i = 0; i < x.rows; ++i)
        if (used[i]) compact[i] = static_cast<int>(n_sv++);
    model.support_points_ = Matrix(n_sv, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        if (used[i])
            std::copy(x.row(i).begin(), x.row(i).end(),
                      model.support_points_.row(static_cast<std::size_t>(compact[i])).begin());

    for (std::size_t m = 0; m < classes.size(); ++m) {
        Machine machine;
        machine.class_code = classes[m];
        machine.bias = machine_bias[m];
        for (std::size_t i = 0; i < x.rows; ++i) {
            if (std::abs(machine_alpha_y[m][i]) > 0.0) {
                machine.sv.push_back(compact[i]);
                machine.coeff.push_back(machine_alpha_y[m][i]);
            }
        }
        model.machines_.push_back(std::move(machine));
    }
    return model;
}

std::vector<double> SvmModel::decision_values(std::span<const double> query) const {
    std::vector<double> kq(support_points_.rows);
    for (std::size_t i = 0; i < support_points_.rows; ++i)
        kq[i] = rbf(query, support_points_.row(i), gamma_);
    std::vector<double> out;
    out.reserve(machines_.size());
    for (const Machine& m : machines_) {
        double acc = m.bias;
        for (std::size_t s = 0; s < m.sv.size(); ++s) acc += m.coeff[s] * kq[m.sv[s]];
        out.push_back(acc);
    }
    return out;
}

int SvmModel::predict(std::span<const double> query) const {
    const std::vector<double> values = decision_values(query);
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return machines_[best].class_code;
}

json SvmModel::to_json() const {
    json machines = json::array();
    for (const Machine& m : machines_)
        machines.push_back(json{{"class", m.class_code}, {"sv", m.sv}, {"coeff", m.coeff},
                                {"bias", m.bias}});
    return json{{"gamma", gamma_},
                {"sv_rows", support_points_.rows},
                {"sv_cols", support_points_.cols},
                {"sv_points", support_points_.data},
                {"machines", machines}};
}

SvmModel SvmModel::from_json(const json& j) {
    SvmModel model;
    model.gamma_ = j.at("gamma").get<double>();
    model.support_points_.rows = j.at("sv_rows").get<std::size_t>();
    model.support_points_.cols = j.at("sv_cols").get<std::size_t>();
    model.support_points_.data = j.at("sv_points").get<std::vector<double>>();
    if (model.support_points_.data.size() != model.support_points_.rows * model.support_points_.cols)
        throw SchemaError("svm payload: support point size mismatch");
    for (const auto& m : j.at("machines")) {
        Machine machine;
        machine.class_code = m.at("class").get<int>();
        machine.sv = m.at("sv").get<std::vector<int>>();
        machine.coeff = m.at("coeff").get<std::vector<double>>();
        machine.bias = m.at("bias").get<double>();
        model.machines_.push_back(std::move(machine));
    }
    if (model.machines_.empty()) throw SchemaError("svm payload: no machines");
    return model;
}

}  // namespace terrastep
