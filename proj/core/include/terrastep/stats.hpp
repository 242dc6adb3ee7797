#pragma once

#include <cstddef>
#include <span>

namespace terrastep::stats {

// Per-footstep statistics used by the feature extractor. A series has N
// samples indexed 0..N-1; ZCR sums N-1 adjacent sign differences and divides
// by N. Skewness and kurtosis use the nonstandard divisors (N-1)^3 and
// N*(sigma^2)^2 on purpose; see the README for the layout/convention notes.

double sum(std::span<const double> x);
double maximum(std::span<const double> x);
double minimum(std::span<const double> x);
double mean(std::span<const double> x);

/// Population variance, divisor N.
double variance(std::span<const double> x);

/// (1/(N-1)^3) * sum((x_i - mean)^3). Requires N >= 2.
double skewness(std::span<const double> x);

/// sum((x_i - mean)^4) / (N * variance^2), or 0 when variance < 1e-12.
double kurtosis(std::span<const double> x);

/// 0 for v < 0, 1 for v >= 0.
int sign_of(double v);

/// Zero-crossing rate: (1/N) * sum_{i=1}^{N-1} |sign(x_i) - sign(x_{i-1})|.
/// Requires N >= 2.
double zero_crossing_rate(std::span<const double> x);

/// Smallest index i with x_i >= 0.8 * max(x). First-crossing, no
/// interpolation. Requires N >= 1 and max(x) > 0.
std::size_t rise80_index(std::span<const double> x);

}  // namespace terrastep::stats
