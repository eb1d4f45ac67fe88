#include "mci33/core.hpp"

#include <cmath>
#include <numeric>

namespace mci33 {

namespace {

constexpr double kBoundQuantum = 1e9;

// Strips representation noise such as 0.3 - 0.05 = 0.24999999999999997.
double clean(double v) { return std::round(v * 1e12) / 1e12; }

void check_dosages(const std::vector<double>& d, const char* which) {
    if (d.empty()) {
        throw domain_error(std::string("dose grid: drug ") + which + " needs at least one level");
    }
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (!(d[k] > 0.0) || !std::isfinite(d[k])) {
            throw domain_error(std::string("dose grid: drug ") + which + " dosages must be positive");
        }
        if (k > 0 && !(d[k] > d[k - 1])) {
            throw domain_error(std::string("dose grid: drug ") + which +
                               " dosages must be strictly increasing");
        }
    }
}

std::vector<double> index_dosages(int levels) {
    if (levels < 1) throw domain_error("dose grid: level count must be >= 1");
    std::vector<double> d(static_cast<std::size_t>(levels));
    std::iota(d.begin(), d.end(), 1.0);
    return d;
}

}  // namespace

std::string to_string(const DoseCombo& dc) {
    return "(" + std::to_string(dc.i) + "," + std::to_string(dc.j) + ")";
}

DoseGrid::DoseGrid(int levels_a, int levels_b)
    : DoseGrid(index_dosages(levels_a), index_dosages(levels_b)) {}

DoseGrid::DoseGrid(std::vector<double> dosage_a, std::vector<double> dosage_b)
    : dosage_a_(std::move(dosage_a)), dosage_b_(std::move(dosage_b)) {
    check_dosages(dosage_a_, "A");
    check_dosages(dosage_b_, "B");
}

std::vector<DoseCombo> DoseGrid::combinations() const {
    std::vector<DoseCombo> out;
    out.reserve(static_cast<std::size_t>(levels_a() * levels_b()));
    for (int i = 1; i <= levels_a(); ++i)
        for (int j = 1; j <= levels_b(); ++j) out.push_back({i, j});
    return out;
}

std::vector<DoseCombo> DoseGrid::lattice() const {
    std::vector<DoseCombo> out;
    for (int i = 0; i <= levels_a(); ++i)
        for (int j = 0; j <= levels_b(); ++j)
            if (i != 0 || j != 0) out.push_back({i, j});
    return out;
}

TrialData::TrialData(int levels_a, int levels_b)
    : levels_a_(levels_a),
      levels_b_(levels_b),
      n_(static_cast<std::size_t>((levels_a + 1) * (levels_b + 1)), 0),
      y_(n_.size(), 0) {
    if (levels_a < 1 || levels_b < 1) throw domain_error("trial data: empty lattice");
}

std::size_t TrialData::index(const DoseCombo& dc) const {
    if (dc.i < 0 || dc.j < 0 || dc.i > levels_a_ || dc.j > levels_b_ || (dc.i == 0 && dc.j == 0)) {
        throw domain_error("trial data: " + to_string(dc) + " is outside the dose lattice");
    }
    return static_cast<std::size_t>(dc.i * (levels_b_ + 1) + dc.j);
}

void TrialData::add(const DoseCombo& dc, int patients, int dlts) {
    if (patients < 0 || dlts < 0 || dlts > patients) {
        throw domain_error("trial data: need 0 <= y <= n for cohort at " + to_string(dc));
    }
    const auto k = index(dc);
    n_[k] += patients;
    y_[k] += dlts;
}

void TrialData::set(const DoseCombo& dc, int n, int y) {
    if (n < 0 || y < 0 || y > n) throw domain_error("trial data: need 0 <= y <= n at " + to_string(dc));
    const auto k = index(dc);
    n_[k] = n;
    y_[k] = y;
}

int TrialData::total_n() const { return std::accumulate(n_.begin(), n_.end(), 0); }

std::vector<DoseCombo> TrialData::tried_doses() const {
    std::vector<DoseCombo> out;
    for (int i = 0; i <= levels_a_; ++i)
        for (int j = 0; j <= levels_b_; ++j)
            if ((i != 0 || j != 0) && n({i, j}) > 0) out.push_back({i, j});
    return out;
}

EquivalenceInterval::EquivalenceInterval(double target, double eps_low, double eps_high) {
    if (!(eps_low >= 0.0) || !(eps_high >= 0.0)) {
        throw domain_error("equivalence interval: margins must be nonnegative");
    }
    *this = from_bounds(target, target - eps_low, target + eps_high);
}

EquivalenceInterval EquivalenceInterval::from_bounds(double target, double lower, double upper) {
    EquivalenceInterval ei;
    ei.target_ = clean(target);
    ei.lower_ = clean(lower);
    ei.upper_ = clean(upper);
    if (!(ei.lower_ > 0.0 && ei.lower_ <= ei.target_ && ei.target_ <= ei.upper_ && ei.upper_ < 1.0)) {
        throw domain_error("equivalence interval: need 0 < lower <= p_T <= upper < 1");
    }
    return ei;
}

bool EquivalenceInterval::contains(double p) const {
    return compare_ratio(std::llround(p * 1e12), 1'000'000'000'000LL, lower_) >= 0 &&
           compare_ratio(std::llround(p * 1e12), 1'000'000'000'000LL, upper_) <= 0;
}

char to_char(Decision d) {
    switch (d) {
        case Decision::Escalate: return 'E';
        case Decision::Stay: return 'S';
        case Decision::DeEscalate: return 'D';
    }
    return '?';
}

Decision decision_from_char(char c) {
    switch (c) {
        case 'E': return Decision::Escalate;
        case 'S': return Decision::Stay;
        case 'D': return Decision::DeEscalate;
        default: throw domain_error(std::string("unknown decision '") + c + "'");
    }
}

int compare_ratio(std::int64_t num, std::int64_t den, double bound) {
    // num/den vs b/Q  <=>  num*Q vs b*den, evaluated in 128-bit integers.
    const auto b = static_cast<__int128>(std::llround(bound * kBoundQuantum));
    const auto lhs = static_cast<__int128>(num) * static_cast<__int128>(kBoundQuantum);
    const auto rhs = b * static_cast<__int128>(den);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

}  // namespace mci33
