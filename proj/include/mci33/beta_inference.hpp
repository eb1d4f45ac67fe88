#pragma once

// Beta-Binomial posterior quantities used by the rule-based stages and the
// safety rules. The posterior after y DLTs in n patients under a Beta(a0, b0)
// prior is Beta(a0 + y, b0 + n - y).

#include "mci33/core.hpp"

namespace mci33 {

struct BetaPrior {
    double a0 = 0.05;
    double b0 = 0.05;

    // Prior for interval probabilities, utilities and SR1.
    static constexpr BetaPrior decision() { return {0.05, 0.05}; }
    // Prior for the posterior means that feed MTDC selection.
    static constexpr BetaPrior selection() { return {0.005, 0.005}; }
};

// Pr(lower <= p <= upper | n, y).
double interval_prob(int n, int y, double lower, double upper,
                     const BetaPrior& prior = BetaPrior::decision());
double interval_prob(int n, int y, const EquivalenceInterval& ei,
                     const BetaPrior& prior = BetaPrior::decision());

// Pr(p > threshold | n, y).
double exceed_prob(int n, int y, double threshold,
                   const BetaPrior& prior = BetaPrior::decision());

// Posterior mean (a0 + y) / (a0 + b0 + n).
double posterior_mean(int n, int y, const BetaPrior& prior);

// Stage II utility: interval probability shifted by delta = dose_sum * eps.
// Doses with an observed rate at or below the target (and untried doses) get
// +delta, so ties break toward the higher total dosage; doses above target get
// -delta, so ties break toward the lower one.
double utility(int n, int y, double dose_sum, const EquivalenceInterval& ei, double eps = 1e-6);

}  // namespace mci33
