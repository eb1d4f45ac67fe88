#include "mci33/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mci33 {

namespace {

constexpr int kDim = 4;  // b0, log b1, log b2, log b3
using Vec = std::array<double, kDim>;
using Mat = std::array<std::array<double, kDim>, kDim>;

struct Observation {
    double x1, x2, x12;
    int n, y;
};

double softplus(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

double logit_of(double p) { return std::log(p / (1.0 - p)); }

class Target {
public:
    Target(std::vector<Observation> obs, const PriorSpec& prior) : obs_(std::move(obs)), prior_(prior) {}

    double operator()(const Vec& t) const {
        const double b1 = std::exp(t[1]), b2 = std::exp(t[2]), b3 = std::exp(t[3]);
        double ll = 0.0;
        for (const auto& o : obs_) {
            const double eta = t[0] + b1 * o.x1 + b2 * o.x2 + b3 * o.x12;
            ll += o.y * eta - o.n * softplus(eta);
        }
        auto sq = [](double v) { return v * v; };
        double lp = -0.5 * sq(t[0] - prior_.intercept_mean) / prior_.intercept_var;
        for (int k = 1; k < kDim; ++k) lp -= 0.5 * sq(t[k] - prior_.slope_log_location) / prior_.slope_log_var;
        return ll + lp;
    }

private:
    std::vector<Observation> obs_;
    PriorSpec prior_;
};

// Lower Cholesky factor; adds jitter until the matrix is positive definite.
Mat cholesky(Mat a) {
    for (double jitter = 0.0;; jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0) {
        Mat l{};
        bool ok = true;
        for (int r = 0; r < kDim && ok; ++r) {
            for (int c = 0; c <= r; ++c) {
                double s = a[r][c] + (r == c ? jitter : 0.0);
                for (int k = 0; k < c; ++k) s -= l[r][k] * l[c][k];
                if (r == c) {
                    if (!(s > 0.0)) {
                        ok = false;
                        break;
                    }
                    l[r][c] = std::sqrt(s);
                } else {
                    l[r][c] = s / l[c][c];
                }
            }
        }
        if (ok) return l;
        if (jitter > 1.0) {
            Mat id{};
            for (int k = 0; k < kDim; ++k) id[k][k] = 1.0;
            return id;
        }
    }
}

Mat empirical_cov(const std::vector<Vec>& hist, std::size_t from) {
    Vec mean{};
    const auto m = static_cast<double>(hist.size() - from);
    for (std::size_t s = from; s < hist.size(); ++s)
        for (int k = 0; k < kDim; ++k) mean[k] += hist[s][k] / m;
    Mat cov{};
    for (std::size_t s = from; s < hist.size(); ++s)
        for (int r = 0; r < kDim; ++r)
            for (int c = 0; c < kDim; ++c) cov[r][c] += (hist[s][r] - mean[r]) * (hist[s][c] - mean[c]) / (m - 1.0);
    for (int k = 0; k < kDim; ++k) cov[k][k] += 1e-6;
    return cov;
}

}  // namespace

LogisticPosterior::LogisticPosterior(ModelKind kind, DoseGrid grid, std::vector<Coefficients> draws,
                                     double x1max, double x2max, double acceptance_rate)
    : kind_(kind), grid_(std::move(grid)), draws_(std::move(draws)), x1max_(x1max), x2max_(x2max),
      acceptance_(acceptance_rate) {}

double LogisticPosterior::logit(const Coefficients& b, const DoseCombo& dc) const {
    const double x1 = grid_.dosage_a(dc.i);
    const double x2 = grid_.dosage_b(dc.j);
    const bool inside = kind_ == ModelKind::Plain || (x1 <= x1max_ && x2 <= x2max_);
    if (inside) return b[0] + b[1] * x1 + b[2] * x2 + b[3] * x1 * x2;
    return b[0] + b[4] * x1 + b[5] * x2 + b[6] * x1 * x2;
}

double LogisticPosterior::prob(const Coefficients& b, const DoseCombo& dc) const {
    const double eta = logit(b, dc);
    // Logistic function evaluated without overflow; stays strictly inside (0,1)
    // for any finite eta representable as a probability.
    return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

double LogisticPosterior::mean_prob(const DoseCombo& dc) const {
    double s = 0.0;
    for (const auto& b : draws_) s += prob(b, dc);
    return s / static_cast<double>(draws_.size());
}

double LogisticPosterior::interval_prob(const DoseCombo& dc, const EquivalenceInterval& ei) const {
    // Membership is monotone in eta, so compare on the logit scale.
    const double lo = logit_of(ei.lower());
    const double hi = logit_of(ei.upper());
    std::size_t hits = 0;
    for (const auto& b : draws_) {
        const double eta = logit(b, dc);
        if (eta >= lo && eta <= hi) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(draws_.size());
}

LogisticPosterior fit(ModelKind kind, const TrialData& data, const DoseGrid& grid,
                      const PriorSpec& prior, const SamplerConfig& sampler, std::uint64_t seed) {
    if (sampler.iterations <= sampler.burn_in || sampler.burn_in < 0 || sampler.thin < 1) {
        throw domain_error("sampler: need iterations > burn_in >= 0 and thin >= 1");
    }
    if (!(prior.intercept_var > 0.0 && prior.slope_log_var > 0.0 && prior.extra_var > 0.0)) {
        throw domain_error("prior: variances must be positive");
    }

    std::vector<Observation> obs;
    double x1max = 0.0, x2max = 0.0;
    for (const auto& dc : data.tried_doses()) {
        const double x1 = grid.dosage_a(dc.i), x2 = grid.dosage_b(dc.j);
        obs.push_back({x1, x2, x1 * x2, data.n(dc), data.y(dc)});
        x1max = std::max(x1max, x1);
        x2max = std::max(x2max, x2);
    }
    const Target target(std::move(obs), prior);

    Rng rng(seed);
    Vec theta{prior.intercept_mean, prior.slope_log_location, prior.slope_log_location,
              prior.slope_log_location};
    double current = target(theta);
    if (!std::isfinite(current)) throw std::runtime_error("model fit: non-finite log posterior at start");

    Mat chol{};
    for (int k = 0; k < kDim; ++k) chol[k][k] = k == 0 ? 1.0 : 0.5;
    double scale = 1.0;

    std::vector<Vec> history;
    history.reserve(static_cast<std::size_t>(sampler.burn_in));
    std::vector<Coefficients> draws;
    draws.reserve(static_cast<std::size_t>((sampler.iterations - sampler.burn_in) / sampler.thin + 1));

    int batch_accepts = 0, batch_size = 0;
    long kept_accepts = 0, kept_total = 0;
    constexpr int kBatch = 50;

    for (int it = 0; it < sampler.iterations; ++it) {
        Vec z;
        for (auto& v : z) v = rng.normal();
        Vec prop = theta;
        for (int r = 0; r < kDim; ++r)
            for (int c = 0; c <= r; ++c) prop[r] += scale * chol[r][c] * z[c];

        const double cand = target(prop);
        const bool accept = std::isfinite(cand) && std::log(std::max(rng.uniform(), 1e-300)) < cand - current;
        if (accept) {
            theta = prop;
            current = cand;
        }

        if (it < sampler.burn_in) {
            history.push_back(theta);
            batch_accepts += accept ? 1 : 0;
            ++batch_size;
            if (batch_size == kBatch) {
                const double rate = static_cast<double>(batch_accepts) / kBatch;
                if (rate < 0.2) scale *= 0.75;
                else if (rate > 0.5) scale *= 1.3;
                batch_accepts = batch_size = 0;
            }
            // Learn the proposal shape from the second quarter of burn-in on.
            if (it + 1 >= sampler.burn_in / 4 && (it + 1) % 200 == 0 && history.size() > 100) {
                const auto cov = empirical_cov(history, history.size() / 2);
                Mat scaled{};
                for (int r = 0; r < kDim; ++r)
                    for (int c = 0; c < kDim; ++c) scaled[r][c] = cov[r][c] * (2.38 * 2.38 / kDim);
                chol = cholesky(scaled);
                scale = 1.0;
            }
            continue;
        }

        ++kept_total;
        kept_accepts += accept ? 1 : 0;
        if ((it - sampler.burn_in) % sampler.thin != 0) continue;
        Coefficients b{};
        b[0] = theta[0];
        b[1] = std::exp(theta[1]);
        b[2] = std::exp(theta[2]);
        b[3] = std::exp(theta[3]);
        if (kind == ModelKind::ChangePoint) {
            // Every tried DC lies inside the tested rectangle, so b4..b6 never
            // touch the likelihood and their full conditional is the prior.
            const double sd = std::sqrt(prior.extra_var);
            for (int k = 4; k < 7; ++k) b[k] = prior.extra_mean + sd * rng.normal();
        }
        draws.push_back(b);
    }

    const double acc = kept_total > 0 ? static_cast<double>(kept_accepts) / static_cast<double>(kept_total) : 0.0;
    return LogisticPosterior(kind, grid, std::move(draws), x1max, x2max, acc);
}

MonitorReading monitor(const LogisticPosterior& post, const EquivalenceInterval& ei, double eta) {
    MonitorReading out;
    bool first = true;
    for (const auto& dc : post.grid().combinations()) {
        const double p = post.interval_prob(dc, ei);
        if (first || p > out.probability) {
            out.best = dc;
            out.probability = p;
            first = false;
        }
    }
    out.triggered = out.probability > eta;
    return out;
}

bool monitor_trigger(const LogisticPosterior& post, const EquivalenceInterval& ei, double eta) {
    return monitor(post, ei, eta).triggered;
}

DoseCombo stage3_select(const LogisticPosterior& post, const DoseSet& admissible,
                        const EquivalenceInterval& ei, Rng& rng) {
    std::vector<DoseCombo> pool;
    for (const auto& dc : admissible)
        if (dc.is_combination()) pool.push_back(dc);
    if (pool.empty()) throw domain_error("stage III: admissible set is empty");

    std::vector<DoseCombo> best;
    double best_p = -1.0;
    for (const auto& dc : pool) {
        const double p = post.interval_prob(dc, ei);
        if (p > best_p) {
            best = {dc};
            best_p = p;
        } else if (p == best_p) {
            best.push_back(dc);
        }
    }
    if (best.size() == 1) return best.front();

    double top_sum = -1.0;
    for (const auto& dc : best) top_sum = std::max(top_sum, post.grid().dose_sum(dc));
    std::vector<DoseCombo> finalists;
    for (const auto& dc : best)
        if (post.grid().dose_sum(dc) == top_sum) finalists.push_back(dc);
    return finalists.size() == 1 ? finalists.front() : finalists[rng.index(finalists.size())];
}

}  // namespace mci33
