#include "mci33/beta_inference.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>

namespace mci33 {

namespace {

void check_counts(int n, int y, const BetaPrior& prior) {
    if (n < 0 || y < 0 || y > n) {
        throw domain_error("beta inference: need 0 <= y <= n, got n=" + std::to_string(n) +
                           " y=" + std::to_string(y));
    }
    if (!(prior.a0 > 0.0) || !(prior.b0 > 0.0)) {
        throw domain_error("beta inference: prior parameters must be positive");
    }
}

// Regularized incomplete beta I_x(a, b) with the endpoints pinned.
double cdf(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
}

}  // namespace

double interval_prob(int n, int y, double lower, double upper, const BetaPrior& prior) {
    check_counts(n, y, prior);
    if (lower > upper) throw domain_error("beta inference: interval lower bound above upper bound");
    const double a = prior.a0 + y;
    const double b = prior.b0 + (n - y);
    // Use the complementary tail when it is the smaller quantity so that
    // differences of nearly-equal CDF values keep their absolute accuracy.
    if (lower >= 0.5) {
        const double hi = upper >= 1.0 ? 0.0 : boost::math::ibetac(a, b, upper);
        const double lo = lower >= 1.0 ? 0.0 : boost::math::ibetac(a, b, lower);
        return std::clamp(lo - hi, 0.0, 1.0);
    }
    return std::clamp(cdf(a, b, upper) - cdf(a, b, lower), 0.0, 1.0);
}

double interval_prob(int n, int y, const EquivalenceInterval& ei, const BetaPrior& prior) {
    return interval_prob(n, y, ei.lower(), ei.upper(), prior);
}

double exceed_prob(int n, int y, double threshold, const BetaPrior& prior) {
    check_counts(n, y, prior);
    if (threshold <= 0.0) return 1.0;
    if (threshold >= 1.0) return 0.0;
    return boost::math::ibetac(prior.a0 + y, prior.b0 + (n - y), threshold);
}

double posterior_mean(int n, int y, const BetaPrior& prior) {
    check_counts(n, y, prior);
    return (prior.a0 + y) / (prior.a0 + prior.b0 + n);
}

double utility(int n, int y, double dose_sum, const EquivalenceInterval& ei, double eps) {
    const double base = interval_prob(n, y, ei, BetaPrior::decision());
    const double delta = dose_sum * eps;
    if (n > 0 && compare_ratio(y, n, ei.target()) > 0) return base - delta;
    return base + delta;
}

}  // namespace mci33
