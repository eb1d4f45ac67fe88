#pragma once

// Domain types shared by every engine: the dose lattice, per-combination
// counts, the equivalence interval and the partial order on combinations.

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mci33 {

// Raised when inputs violate a documented precondition (bad counts,
// malformed intervals, ...).
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when an operation is applied to a trial in the wrong state
// (outcome for an unassigned dose, observing a stopped trial, ...).
class state_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A lattice point (i, j): level i of drug A and level j of drug B.
// (i, 0) and (0, j) are single-agent doses; (0, 0) is never materialized.
struct DoseCombo {
    int i = 0;
    int j = 0;

    constexpr bool is_combination() const { return i >= 1 && j >= 1; }
    constexpr bool is_single_agent() const { return (i == 0) != (j == 0); }

    friend constexpr auto operator<=>(const DoseCombo&, const DoseCombo&) = default;
};

std::string to_string(const DoseCombo& dc);

using DoseSet = std::set<DoseCombo>;

// (a.i > b.i and a.j >= b.j) or (a.i >= b.i and a.j > b.j), written out as
// the three admissible clauses so diagonal pairs stay incomparable.
constexpr bool is_higher(const DoseCombo& a, const DoseCombo& b) {
    return (a.i > b.i && a.j > b.j) || (a.i > b.i && a.j == b.j) ||
           (a.i == b.i && a.j > b.j);
}

constexpr bool is_lower(const DoseCombo& a, const DoseCombo& b) {
    return (a.i < b.i && a.j < b.j) || (a.i < b.i && a.j == b.j) ||
           (a.i == b.i && a.j < b.j);
}

class DoseGrid {
public:
    // Index dosages x_1i = i, x_2j = j.
    DoseGrid(int levels_a, int levels_b);
    DoseGrid(std::vector<double> dosage_a, std::vector<double> dosage_b);

    int levels_a() const { return static_cast<int>(dosage_a_.size()); }
    int levels_b() const { return static_cast<int>(dosage_b_.size()); }

    // Dosage of level i of drug A; level 0 means the drug is absent.
    double dosage_a(int i) const { return i == 0 ? 0.0 : dosage_a_.at(i - 1); }
    double dosage_b(int j) const { return j == 0 ? 0.0 : dosage_b_.at(j - 1); }
    const std::vector<double>& dosages_a() const { return dosage_a_; }
    const std::vector<double>& dosages_b() const { return dosage_b_; }

    double dose_sum(const DoseCombo& dc) const { return dosage_a(dc.i) + dosage_b(dc.j); }

    // Member of sigma: inside the (I+1)x(J+1) lattice and not (0,0).
    bool contains(const DoseCombo& dc) const {
        return dc.i >= 0 && dc.j >= 0 && dc.i <= levels_a() && dc.j <= levels_b() &&
               !(dc.i == 0 && dc.j == 0);
    }
    bool contains_combination(const DoseCombo& dc) const {
        return contains(dc) && dc.is_combination();
    }

    // All combination DCs, row-major (i, then j).
    std::vector<DoseCombo> combinations() const;
    // Every member of sigma, row-major.
    std::vector<DoseCombo> lattice() const;

    friend bool operator==(const DoseGrid&, const DoseGrid&) = default;

private:
    std::vector<double> dosage_a_;
    std::vector<double> dosage_b_;
};

// Sufficient statistics (n_ij, y_ij) over the whole lattice, margins included.
class TrialData {
public:
    TrialData() = default;
    TrialData(int levels_a, int levels_b);

    int levels_a() const { return levels_a_; }
    int levels_b() const { return levels_b_; }

    int n(const DoseCombo& dc) const { return n_.at(index(dc)); }
    int y(const DoseCombo& dc) const { return y_.at(index(dc)); }
    bool tried(const DoseCombo& dc) const { return n(dc) > 0; }

    // Adds a cohort's result; enforces 0 <= y <= n cumulatively.
    void add(const DoseCombo& dc, int patients, int dlts);
    void set(const DoseCombo& dc, int n, int y);

    int total_n() const;
    std::vector<DoseCombo> tried_doses() const;

    friend bool operator==(const TrialData&, const TrialData&) = default;

private:
    std::size_t index(const DoseCombo& dc) const;

    int levels_a_ = 0;
    int levels_b_ = 0;
    std::vector<int> n_;
    std::vector<int> y_;
};

class EquivalenceInterval {
public:
    EquivalenceInterval(double target, double eps_low, double eps_high);
    static EquivalenceInterval from_bounds(double target, double lower, double upper);

    double target() const { return target_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

    // Closed-interval membership for a probability value.
    bool contains(double p) const;

    friend bool operator==(const EquivalenceInterval&, const EquivalenceInterval&) = default;

private:
    EquivalenceInterval() = default;
    double target_ = 0.3;
    double lower_ = 0.25;
    double upper_ = 0.35;
};

enum class Decision { Escalate, Stay, DeEscalate };

char to_char(Decision d);
Decision decision_from_char(char c);

// Exact comparison of the ratio num/den against a decimal bound. The bound is
// quantized to 1e-9 so that, e.g., 1/4 against 0.25 compares equal.
// Returns <0, 0, >0 like a three-way comparison.
int compare_ratio(std::int64_t num, std::int64_t den, double bound);

}  // namespace mci33
