#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "../oracles.hpp"
#include "mci33/isotonic.hpp"

using namespace mci33;

namespace {

bool monotone(const Matrix& m) {
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) {
            if (r + 1 < m.rows && m(r, c) > m(r + 1, c)) return false;
            if (c + 1 < m.cols && m(r, c) > m(r, c + 1)) return false;
        }
    return true;
}

Matrix random_matrix(Rng& rng, int rows, int cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (auto& v : m.values) v = lo + (hi - lo) * rng.uniform();
    return m;
}

}  // namespace

TEST_CASE("PAVA matches exhaustive block search") {
    Rng rng(1);
    for (int rep = 0; rep < 300; ++rep) {
        const auto n = 1 + rng.index(8);
        std::vector<double> v(n), w(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = rng.uniform(), w[k] = 0.1 + 5 * rng.uniform();
        const auto got = pava(v, w);
        const auto want = oracle::brute_pava(v, w);
        REQUIRE(got.size() == n);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(got[k] - want[k]) < 1e-12);
    }
}

TEST_CASE("PAVA keeps sorted input and pools a reversed pair") {
    CHECK(pava({0.1, 0.2, 0.3}, {1, 1, 1}) == std::vector<double>{0.1, 0.2, 0.3});
    const auto p = pava({0.4, 0.2}, {1, 3});
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.25));
}

TEST_CASE("two-dimensional fit is monotone and optimal on small grids") {
    Rng rng(2);
    for (int rep = 0; rep < 200; ++rep) {
        const int rows = 2 + static_cast<int>(rng.index(2)), cols = 2 + static_cast<int>(rng.index(2));
        const Matrix v = random_matrix(rng, rows, cols, 0, 1);
        const Matrix w = random_matrix(rng, rows, cols, 0.05, 10);
        const auto fit = isotonic_2d(v, w);
        CHECK(monotone(fit.estimates));
        const auto want = oracle::brute_isotonic_2d(v.values, w.values, rows, cols);
        for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(fit.estimates.values[k] - want[k]) < 1e-6);
    }
}

TEST_CASE("single row or column reduces to PAVA") {
    Rng rng(4);
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix v = random_matrix(rng, 1, 6, 0, 1), w = random_matrix(rng, 1, 6, 0.1, 4);
        const auto fit = isotonic_2d(v, w);
        const auto p = pava(v.values, w.values);
        for (std::size_t k = 0; k < p.size(); ++k) CHECK(std::abs(fit.estimates.values[k] - p[k]) < 1e-8);
        Matrix vc(6, 1), wc(6, 1);
        vc.values = v.values;
        wc.values = w.values;
        const auto col = isotonic_2d(vc, wc);
        for (std::size_t k = 0; k < p.size(); ++k) CHECK(std::abs(col.estimates.values[k] - p[k]) < 1e-8);
    }
}

TEST_CASE("full-size fits are exactly monotone") {
    Rng rng(8);
    for (int rep = 0; rep < 100; ++rep) {
        const auto fit = isotonic_2d(random_matrix(rng, 4, 5, 0, 1), random_matrix(rng, 4, 5, 0.01, 12));
        CHECK(monotone(fit.estimates));
    }
}

TEST_CASE("bad shapes and weights are rejected") {
    CHECK_THROWS_AS(isotonic_2d(Matrix(2, 2), Matrix(2, 3, 1.0)), domain_error);
    CHECK_THROWS_AS(isotonic_2d(Matrix(2, 2), Matrix(2, 2, 0.0)), domain_error);
    Matrix neg(2, 2, 1.0);
    neg(0, 0) = -1;
    CHECK_THROWS_AS(isotonic_2d(Matrix(2, 2), neg), domain_error);
}

TEST_CASE("posterior means and weights over combinations") {
    TrialData d(2, 2);
    d.add({1, 2}, 3, 1);
    d.add({1, 0}, 3, 3);
    const auto m = posterior_means(d);
    CHECK(m.rows == 2);
    CHECK(m.at({1, 2}) == doctest::Approx(1.005 / 3.01));
    CHECK(m.at({2, 2}) == doctest::Approx(0.5));
    CHECK(isotonic_weights(d).at({1, 2}) == doctest::Approx(3.01));
}

TEST_CASE("MTDC choice: closest estimate, then more patients, then dose sum") {
    const DoseGrid grid(2, 2);
    TrialData d(2, 2);
    d.add({1, 1}, 3, 0);
    d.add({1, 2}, 6, 2);
    d.add({2, 1}, 3, 1);
    IsotonicFit fit;
    fit.estimates = Matrix(2, 2);
    fit.estimates(0, 0) = 0.1;
    fit.estimates(0, 1) = 0.28;
    fit.estimates(1, 0) = 0.32;
    fit.estimates(1, 1) = 0.3;  // untried, never eligible
    Rng rng(1);
    CHECK(select_mtdc(d, fit, grid, 0.3, {}, rng) == DoseCombo{1, 2});  // 0.02 from target, 6 patients
    CHECK(select_mtdc(d, fit, grid, 0.3, {{1, 2}}, rng) == DoseCombo{2, 1});
    CHECK_FALSE(select_mtdc(d, fit, grid, 0.3, {{1, 1}, {1, 2}, {2, 1}, {2, 2}}, rng).has_value());

    const EquivalenceInterval ei(0.3, 0.05, 0.05);
    CHECK(select_mtdc_multiple(d, fit, ei, {}) == DoseSet{{1, 2}, {2, 1}});
}

TEST_CASE("equal distance and patients: the higher dose sum wins") {
    const DoseGrid grid(2, 3);
    TrialData d(2, 3);
    d.add({1, 1}, 3, 1);
    d.add({2, 2}, 3, 1);
    IsotonicFit fit;
    fit.estimates = Matrix(2, 3, 0.9);
    fit.estimates(0, 0) = 0.25;
    fit.estimates(1, 1) = 0.35;
    Rng rng(1);
    CHECK(select_mtdc(d, fit, grid, 0.3, {}, rng) == DoseCombo{2, 2});
}
