#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support/fixtures.hpp"
#include "terrastep/pca.hpp"
#include "terrastep/rng.hpp"

using namespace terrastep;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (auto& v : m.data) v = rng.next_gaussian();
    return m;
}

}  // namespace

TEST_CASE("jacobi eigensolver on a known matrix") {
    // eigenvalues of [[2,1],[1,2]] are 3 and 1
    Matrix m(2, 2);
    m.at(0, 0) = 2; m.at(0, 1) = 1;
    m.at(1, 0) = 1; m.at(1, 1) = 2;
    const auto [values, vectors] = symmetric_eigen(m);
    CHECK(values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(values[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(vectors.at(0, 0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("components are orthonormal and variances non-increasing") {
    const Matrix x = random_matrix(120, 20, 3);
    const PcaResult pca = pca_project(x, 6);

    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            double dot = 0.0;
            for (std::size_t d = 0; d < 20; ++d)
                dot += pca.components.at(i, d) * pca.components.at(j, d);
            CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
        }
    }
    for (std::size_t i = 1; i < pca.explained_variance.size(); ++i)
        CHECK(pca.explained_variance[i] <= pca.explained_variance[i - 1] + 1e-12);
}

TEST_CASE("data on a 2-D plane has a vanishing third component") {
    Rng rng(5);
    Matrix x(100, 10);
    for (std::size_t r = 0; r < 100; ++r) {
        const double a = rng.next_gaussian(), b = rng.next_gaussian();
        for (std::size_t d = 0; d < 10; ++d)
            x.at(r, d) = a * std::cos(static_cast<double>(d)) + b * std::sin(0.7 * d);
    }
    const PcaResult pca = pca_project(x, 3);
    CHECK(pca.explained_variance[2] < 1e-9 * pca.explained_variance[0]);
}

TEST_CASE("reconstruction error equals the discarded eigenvalue sum") {
    // independent route: trace of the covariance comes straight from the
    // standardized data, so the identity cross-checks the eigensolver
    const Matrix x = random_matrix(80, 10, 7);
    const int dims = 4;
    const PcaResult pca = pca_project(x, dims);

    double recon_error = 0.0;  // mean squared residual per (n-1)
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t d = 0; d < x.cols; ++d) {
            const double z = (x.at(r, d) - pca.mean[d]) / pca.scale[d];
            double back = 0.0;
            for (int k = 0; k < dims; ++k)
                back += pca.projected.at(r, k) * pca.components.at(k, d);
            recon_error += (z - back) * (z - back);
        }
    }
    recon_error /= static_cast<double>(x.rows - 1);

    double kept = 0.0;
    for (double v : pca.explained_variance) kept += v;
    const double discarded = pca.total_variance - kept;
    CHECK(recon_error == doctest::Approx(discarded).epsilon(1e-6));
}

TEST_CASE("projection of projected data is idempotent up to sign") {
    const Matrix x = random_matrix(60, 12, 9);
    const PcaResult first = pca_project(x, 3);
    const PcaResult second = pca_project(first.projected, 3);
    for (std::size_t r = 0; r < 60; ++r)
        for (int k = 0; k < 3; ++k) {
            // re-projecting cannot mix components, only standardize/flip them
            const double a = second.projected.at(r, k);
            bool matched = false;
            for (int j = 0; j < 3; ++j) {
                const double z = (first.projected.at(r, j) - second.mean[j]) / second.scale[j];
                if (std::abs(std::abs(a) - std::abs(z)) < 1e-6 * std::max(1.0, std::abs(z)))
                    matched = true;
            }
            CHECK(matched);
        }
}

TEST_CASE("error paths") {
    SUBCASE("fewer rows than dims") {
        const Matrix x = random_matrix(2, 5, 1);
        CHECK_THROWS_AS(pca_project(x, 3), std::invalid_argument);
    }
    SUBCASE("zero-variance dataset names the constant columns") {
        Matrix x(10, 3);
        for (std::size_t r = 0; r < 10; ++r)
            for (std::size_t c = 0; c < 3; ++c) x.at(r, c) = 4.0;
        try {
            pca_project(x, 2);
            FAIL("expected an exception");
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            CHECK(msg.find("constant") != std::string::npos);
            CHECK(msg.find('0') != std::string::npos);
        }
    }
}

TEST_CASE("pca.csv export round-trips as valid CSV") {
    namespace fs = std::filesystem;
    const Dataset ds = fixtures::blob_dataset(5, 21);
    const PcaResult pca = pca_project(ds, 3);
    const fs::path path = fs::temp_directory_path() / "terrastep_test_pca.csv";
    save_pca_csv(pca, ds, path.string());

    std::ifstream in(path);
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header == "pc1,pc2,pc3,label");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == ds.size());
    fs::remove(path);
}
