#pragma once

// Bivariate isotonic regression over the combination matrix and the final
// MTDC choice.

#include <optional>
#include <vector>

#include "mci33/beta_inference.hpp"
#include "mci33/core.hpp"
#include "mci33/rng.hpp"

namespace mci33 {

// Dense row-major matrix. Row r, column c of a combination matrix holds DC
// (r+1, c+1).
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), values(static_cast<std::size_t>(r * c), fill) {}

    double& operator()(int r, int c) { return values[static_cast<std::size_t>(r * cols + c)]; }
    double operator()(int r, int c) const { return values[static_cast<std::size_t>(r * cols + c)]; }

    double at(const DoseCombo& dc) const { return (*this)(dc.i - 1, dc.j - 1); }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct IsotonicFit {
    Matrix estimates;  // non-decreasing along every row and every column
    Matrix weights;
    int iterations = 0;
};

// Weighted pool-adjacent-violators: the non-decreasing sequence closest to
// `values` in weighted least squares.
std::vector<double> pava(const std::vector<double>& values, const std::vector<double>& weights);

// Posterior means (a0 + y) / (a0 + b0 + n) over the combination DCs.
Matrix posterior_means(const TrialData& data, const BetaPrior& prior = BetaPrior::selection());

// Weights n + a0 + b0 over the combination DCs.
Matrix isotonic_weights(const TrialData& data, const BetaPrior& prior = BetaPrior::selection());

// Weighted projection onto matrices non-decreasing in both indices, by
// Dykstra's alternating projections between the row cone and the column
// cone. Throws domain_error on shape mismatch, negative or all-zero weights.
IsotonicFit isotonic_2d(const Matrix& means, const Matrix& weights, double tol = 1e-13,
                        int max_iterations = 200000);

// Tried, non-eliminated combination DC whose estimate is closest to the
// target; ties go to more patients, then higher total dosage, then `rng`.
std::optional<DoseCombo> select_mtdc(const TrialData& data, const IsotonicFit& fit,
                                     const DoseGrid& grid, double target,
                                     const DoseSet& eliminated, Rng& rng);

// Every eligible DC whose estimate lies inside the interval.
DoseSet select_mtdc_multiple(const TrialData& data, const IsotonicFit& fit,
                             const EquivalenceInterval& ei, const DoseSet& eliminated);

}  // namespace mci33
