#include "terrastep/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace terrastep::stats {

namespace {
void require_nonempty(std::span<const double> x, const char* fn) {
    if (x.empty()) throw std::invalid_argument(std::string(fn) + ": empty series");
}
}  // namespace

double sum(std::span<const double> x) {
    require_nonempty(x, "sum");
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

double maximum(std::span<const double> x) {
    require_nonempty(x, "maximum");
    return *std::max_element(x.begin(), x.end());
}

double minimum(std::span<const double> x) {
    require_nonempty(x, "minimum");
    return *std::min_element(x.begin(), x.end());
}

double mean(std::span<const double> x) {
    require_nonempty(x, "mean");
    return sum(x) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    require_nonempty(x, "variance");
    const double mu = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - mu) * (v - mu);
    return acc / static_cast<double>(x.size());
}

double skewness(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("skewness: need at least 2 samples");
    const double mu = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - mu) * (v - mu) * (v - mu);
    const double nm1 = static_cast<double>(x.size() - 1);
    return acc / (nm1 * nm1 * nm1);
}

double kurtosis(std::span<const double> x) {
    require_nonempty(x, "kurtosis");
    const double var = variance(x);
    if (var < 1e-12) return 0.0;  // constant segments occur on rigid terrains
    const double mu = mean(x);
    double acc = 0.0;
    for (double v : x) {
        const double d = (v - mu) * (v - mu);
        acc += d * d;
    }
    return acc / (static_cast<double>(x.size()) * var * var);
}

int sign_of(double v) { return v < 0.0 ? 0 : 1; }

double zero_crossing_rate(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("zero_crossing_rate: need at least 2 samples");
    int changes = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        changes += std::abs(sign_of(x[i]) - sign_of(x[i - 1]));
    return static_cast<double>(changes) / static_cast<double>(x.size());
}

std::size_t rise80_index(std::span<const double> x) {
    require_nonempty(x, "rise80_index");
    const double mx = maximum(x);
    if (!(mx > 0.0)) throw std::invalid_argument("rise80_index: series maximum must be positive");
    const double level = 0.8 * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= level) return i;
    return x.size() - 1;  // unreachable: the maximum itself qualifies
}

}  // namespace terrastep::stats
