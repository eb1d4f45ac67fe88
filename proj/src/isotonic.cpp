#include "mci33/isotonic.hpp"

#include <algorithm>
#include <cmath>

namespace mci33 {

std::vector<double> pava(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.size() != weights.size()) throw domain_error("pava: size mismatch");
    struct Block {
        double mean;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        blocks.push_back({values[k], weights[k], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double w = prev.weight + top.weight;
            prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / w;
            prev.weight = w;
            prev.count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
    return out;
}

Matrix posterior_means(const TrialData& data, const BetaPrior& prior) {
    Matrix m(data.levels_a(), data.levels_b());
    for (int i = 1; i <= data.levels_a(); ++i)
        for (int j = 1; j <= data.levels_b(); ++j)
            m(i - 1, j - 1) = posterior_mean(data.n({i, j}), data.y({i, j}), prior);
    return m;
}

Matrix isotonic_weights(const TrialData& data, const BetaPrior& prior) {
    Matrix w(data.levels_a(), data.levels_b());
    for (int i = 1; i <= data.levels_a(); ++i)
        for (int j = 1; j <= data.levels_b(); ++j)
            w(i - 1, j - 1) = data.n({i, j}) + prior.a0 + prior.b0;
    return w;
}

namespace {

Matrix project_rows(const Matrix& x, const Matrix& w) {
    Matrix out(x.rows, x.cols);
    std::vector<double> v(static_cast<std::size_t>(x.cols)), wt(v.size());
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < x.cols; ++c) {
            v[static_cast<std::size_t>(c)] = x(r, c);
            wt[static_cast<std::size_t>(c)] = w(r, c);
        }
        const auto fitted = pava(v, wt);
        for (int c = 0; c < x.cols; ++c) out(r, c) = fitted[static_cast<std::size_t>(c)];
    }
    return out;
}

Matrix project_cols(const Matrix& x, const Matrix& w) {
    Matrix out(x.rows, x.cols);
    std::vector<double> v(static_cast<std::size_t>(x.rows)), wt(v.size());
    for (int c = 0; c < x.cols; ++c) {
        for (int r = 0; r < x.rows; ++r) {
            v[static_cast<std::size_t>(r)] = x(r, c);
            wt[static_cast<std::size_t>(r)] = w(r, c);
        }
        const auto fitted = pava(v, wt);
        for (int r = 0; r < x.rows; ++r) out(r, c) = fitted[static_cast<std::size_t>(r)];
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) d = std::max(d, std::abs(a.values[k] - b.values[k]));
    return d;
}

}  // namespace

IsotonicFit isotonic_2d(const Matrix& means, const Matrix& weights, double tol, int max_iterations) {
    if (means.rows != weights.rows || means.cols != weights.cols || means.rows < 1 || means.cols < 1) {
        throw domain_error("isotonic: means and weights must be conformable, non-empty matrices");
    }
    double max_w = 0.0;
    for (double w : weights.values) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw domain_error("isotonic: weights must be finite and >= 0");
        max_w = std::max(max_w, w);
    }
    if (max_w == 0.0) throw domain_error("isotonic: all weights are zero");

    // Zero-weight cells are free; a tiny floor keeps PAVA block means defined.
    Matrix w = weights;
    for (double& v : w.values) v = std::max(v, max_w * 1e-12);

    Matrix x = means;
    Matrix p(means.rows, means.cols), q(means.rows, means.cols);
    int it = 0;
    for (; it < max_iterations; ++it) {
        Matrix xp = x;
        for (std::size_t k = 0; k < xp.values.size(); ++k) xp.values[k] += p.values[k];
        const Matrix y = project_rows(xp, w);
        for (std::size_t k = 0; k < p.values.size(); ++k) p.values[k] = xp.values[k] - y.values[k];

        Matrix yq = y;
        for (std::size_t k = 0; k < yq.values.size(); ++k) yq.values[k] += q.values[k];
        const Matrix next = project_cols(yq, w);
        for (std::size_t k = 0; k < q.values.size(); ++k) q.values[k] = yq.values[k] - next.values[k];

        const double change = max_abs_diff(next, x);
        const double gap = max_abs_diff(next, y);
        x = next;
        if (change < tol && gap < tol) break;
    }

    // Residual violations are below tol; a running max makes monotonicity exact.
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < x.cols; ++c) {
            if (r > 0) x(r, c) = std::max(x(r, c), x(r - 1, c));
            if (c > 0) x(r, c) = std::max(x(r, c), x(r, c - 1));
        }
    }
    return {x, weights, it + 1};
}

std::optional<DoseCombo> select_mtdc(const TrialData& data, const IsotonicFit& fit,
                                     const DoseGrid& grid, double target,
                                     const DoseSet& eliminated, Rng& rng) {
    std::vector<DoseCombo> best;
    double best_gap = 0.0;
    constexpr double kTie = 1e-12;
    for (const auto& dc : grid.combinations()) {
        if (!data.tried(dc) || eliminated.contains(dc)) continue;
        const double gap = std::abs(fit.estimates.at(dc) - target);
        if (best.empty() || gap < best_gap - kTie) {
            best = {dc};
            best_gap = gap;
        } else if (std::abs(gap - best_gap) <= kTie) {
            best.push_back(dc);
        }
    }
    if (best.empty()) return std::nullopt;
    if (best.size() == 1) return best.front();

    // Ties: more patients, then higher total dosage, then random.
    const auto key = [&](const DoseCombo& dc) { return std::pair{data.n(dc), grid.dose_sum(dc)}; };
    const auto top = std::max_element(best.begin(), best.end(), [&](const auto& a, const auto& b) {
                         return key(a) < key(b);
                     });
    std::vector<DoseCombo> finalists;
    for (const auto& dc : best)
        if (key(dc) == key(*top)) finalists.push_back(dc);
    if (finalists.size() == 1) return finalists.front();
    return finalists[rng.index(finalists.size())];
}

DoseSet select_mtdc_multiple(const TrialData& data, const IsotonicFit& fit,
                             const EquivalenceInterval& ei, const DoseSet& eliminated) {
    DoseSet out;
    for (int i = 1; i <= data.levels_a(); ++i) {
        for (int j = 1; j <= data.levels_b(); ++j) {
            const DoseCombo dc{i, j};
            if (!data.tried(dc) || eliminated.contains(dc)) continue;
            if (ei.contains(fit.estimates.at(dc))) out.insert(dc);
        }
    }
    return out;
}

}  // namespace mci33
