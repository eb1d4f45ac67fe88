#pragma once

// Bayesian logistic dose-toxicity models.
//
//   plain:        logit p = b0 + b1 x1 + b2 x2 + b3 x1 x2
//   change point: the (b1, b2, b3) block applies inside the rectangle of
//                 dosages tested so far, x1 <= x1max and x2 <= x2max; outside
//                 it a second block (b4, b5, b6) takes over.
//
// b1..b3 are log-normal (kept positive so toxicity rises with dose), b0 and
// b4..b6 are normal. Posterior draws come from an adaptive random-walk
// Metropolis chain.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mci33/core.hpp"
#include "mci33/rng.hpp"

namespace mci33 {

enum class ModelKind { ChangePoint, Plain };

struct PriorSpec {
    double intercept_mean = -4.0;
    double intercept_var = 10.0;       // v0
    double slope_log_location = -2.0;  // location of the underlying normal
    double slope_log_var = 10.0;       // v13
    double extra_mean = -2.0;          // b4..b6
    double extra_var = 50.0;

    friend bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

struct SamplerConfig {
    int iterations = 4000;  // total, burn-in included
    int burn_in = 2000;
    int thin = 2;

    friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

using Coefficients = std::array<double, 7>;  // b0..b6; b4..b6 unused by the plain model

class LogisticPosterior {
public:
    LogisticPosterior(ModelKind kind, DoseGrid grid, std::vector<Coefficients> draws,
                      double x1max, double x2max, double acceptance_rate);

    ModelKind kind() const { return kind_; }
    const std::vector<Coefficients>& draws() const { return draws_; }
    double x1max() const { return x1max_; }
    double x2max() const { return x2max_; }
    double acceptance_rate() const { return acceptance_; }
    const DoseGrid& grid() const { return grid_; }

    // Linear predictor and probability for one draw at one DC.
    double logit(const Coefficients& beta, const DoseCombo& dc) const;
    double prob(const Coefficients& beta, const DoseCombo& dc) const;

    double mean_prob(const DoseCombo& dc) const;
    // Fraction of draws with lower <= p <= upper.
    double interval_prob(const DoseCombo& dc, const EquivalenceInterval& ei) const;

private:
    ModelKind kind_;
    DoseGrid grid_;
    std::vector<Coefficients> draws_;
    double x1max_;
    double x2max_;
    double acceptance_;
};

// Fits the model to every tried DC (single-agent doses enter with the other
// dosage at zero). Throws domain_error if the sampler config is invalid and
// std::runtime_error if the likelihood is not finite at the start point.
LogisticPosterior fit(ModelKind kind, const TrialData& data, const DoseGrid& grid,
                      const PriorSpec& prior, const SamplerConfig& sampler, std::uint64_t seed);

// Monitoring signal: the combination DC with the largest Pr(p in EI), if that
// probability exceeds eta.
struct MonitorReading {
    DoseCombo best;
    double probability = 0.0;
    bool triggered = false;
};
MonitorReading monitor(const LogisticPosterior& post, const EquivalenceInterval& ei, double eta);
bool monitor_trigger(const LogisticPosterior& post, const EquivalenceInterval& ei, double eta);

// Stage III choice: argmax of Pr(p in EI) over the admissible combination
// DCs; ties go to the higher total dosage, then to `rng`.
// Throws domain_error on an empty admissible set.
DoseCombo stage3_select(const LogisticPosterior& post, const DoseSet& admissible,
                        const EquivalenceInterval& ei, Rng& rng);

}  // namespace mci33
