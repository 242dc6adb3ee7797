#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "terrastep/rng.hpp"
#include "terrastep/stats.hpp"

using namespace terrastep;

namespace {

std::vector<double> random_series(Rng& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = 10.0 * rng.next_gaussian() + 2.0 * rng.next_double() - 1.0;
    return x;
}

bool close_rel(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("hand-evaluated fixtures") {
    const std::vector<double> v123 = {1, 2, 3};
    CHECK(stats::sum(v123) == 6.0);
    CHECK(stats::sum(std::vector<double>{-1, 1}) == 0.0);

    const std::vector<double> v312 = {3, 1, 2};
    CHECK(stats::maximum(v312) == 3.0);
    CHECK(stats::minimum(v312) == 1.0);
    CHECK(stats::mean(v312) == 2.0);

    const std::vector<double> c = {4.5, 4.5, 4.5};
    CHECK(stats::maximum(c) == 4.5);
    CHECK(stats::minimum(c) == 4.5);
    CHECK(stats::mean(c) == 4.5);
    CHECK(stats::variance(std::vector<double>{1, 1, 1}) == 0.0);
    CHECK(stats::variance(std::vector<double>{0, 2}) == 1.0);

    // symmetric data: third moment vanishes
    CHECK(stats::skewness(std::vector<double>{-1, 0, 1}) == 0.0);
    // mean 1, third moments (-1)+(-1)+8 = 6, divisor (3-1)^3 = 8
    CHECK(stats::skewness(std::vector<double>{0, 0, 3}) == doctest::Approx(0.75).epsilon(1e-12));

    CHECK(stats::kurtosis(std::vector<double>{5, 5, 5, 5}) == 0.0);  // epsilon rule
    // mean 0, var 1, fourth moments sum 2, divisor 2*1
    CHECK(stats::kurtosis(std::vector<double>{-1, 1}) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(stats::sign_of(-0.5) == 0);
    CHECK(stats::sign_of(0.0) == 1);
    CHECK(stats::sign_of(7.0) == 1);

    CHECK(stats::zero_crossing_rate(std::vector<double>{1, -1, 1, -1}) ==
          doctest::Approx(0.75).epsilon(1e-12));
    CHECK(stats::zero_crossing_rate(std::vector<double>{1, 2, 3, 4}) == 0.0);

    CHECK(stats::rise80_index(std::vector<double>{0, 5, 8, 10, 7}) == 2);
    CHECK(stats::rise80_index(std::vector<double>{10, 1, 1}) == 0);
    std::vector<double> ramp(11);
    for (int i = 0; i <= 10; ++i) ramp[i] = i;
    CHECK(stats::rise80_index(ramp) == 8);
}

TEST_CASE("error paths") {
    const std::vector<double> empty;
    const std::vector<double> one = {1.0};
    CHECK_THROWS_AS(stats::sum(empty), std::invalid_argument);
    CHECK_THROWS_AS(stats::mean(empty), std::invalid_argument);
    CHECK_THROWS_AS(stats::variance(empty), std::invalid_argument);
    CHECK_THROWS_AS(stats::skewness(one), std::invalid_argument);
    CHECK_THROWS_AS(stats::zero_crossing_rate(one), std::invalid_argument);
    CHECK_THROWS_AS(stats::rise80_index(std::vector<double>{-1, -2}), std::invalid_argument);
    CHECK_THROWS_AS(stats::rise80_index(std::vector<double>{0, 0}), std::invalid_argument);
}

TEST_CASE("every statistic matches the naive oracle on 1000 random fixtures") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.next_below(200);
        const std::vector<double> x = random_series(rng, n);
        CHECK(close_rel(stats::sum(x), oracle::sum(x)));
        CHECK(stats::maximum(x) == oracle::maximum(x));
        CHECK(stats::minimum(x) == oracle::minimum(x));
        CHECK(close_rel(stats::mean(x), oracle::mean(x)));
        CHECK(close_rel(stats::variance(x), oracle::variance(x)));
        CHECK(close_rel(stats::skewness(x), oracle::skewness(x)));
        CHECK(close_rel(stats::kurtosis(x), oracle::kurtosis(x)));
        CHECK(close_rel(stats::zero_crossing_rate(x), oracle::zcr(x)));
        if (stats::maximum(x) > 0.0) CHECK(stats::rise80_index(x) == oracle::rise80(x));
    }
}
