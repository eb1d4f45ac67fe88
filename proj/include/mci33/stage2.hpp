#pragma once

// Rule-based combination dose finding: build the candidate set from the
// decisions at the current DCs, prune it with the E/D exclusion sets, finalize
// it, and pick up to two DCs by utility.
//
// All functions here work on combination DCs only (i >= 1, j >= 1).
// Single-agent data never enters the exclusion sets or the candidate set.

#include <optional>
#include <string>
#include <vector>

#include "mci33/core.hpp"
#include "mci33/rng.hpp"

namespace mci33 {

// One citation in the decision trace, e.g. rule "4.a" removed (1,4) because
// (1,5) received an E.
struct RuleNote {
    std::string rule;
    std::string action;  // "add", "remove", "admit", "select"
    DoseCombo dose;
    std::optional<DoseCombo> because;

    std::string describe() const;
    friend bool operator==(const RuleNote&, const RuleNote&) = default;
};

struct ExclusionSets {
    DoseSet too_low;    // sigma_E: strictly lower than some tried DC decided E
    DoseSet too_risky;  // sigma_D: strictly higher than some tried DC decided D
};

struct CandidateSet {
    DoseSet members;
    ExclusionSets excluded;
    std::vector<RuleNote> notes;
};

// i3+3 decision from the cumulative counts at a tried DC.
Decision decision_at(const TrialData& data, const DoseCombo& dc, const EquivalenceInterval& ei);

ExclusionSets exclusion_sets(const TrialData& data, const DoseGrid& grid,
                             const EquivalenceInterval& ei);

// Combination DCs in neither exclusion set. This is both the Rule 5.b
// fallback and the set whose emptiness stops the trial.
DoseSet admissible_set(const TrialData& data, const DoseGrid& grid, const EquivalenceInterval& ei);

// Rule 3: union of the additions implied by each current DC's decision.
// Throws state_error if a current DC is untried or not a combination.
CandidateSet build_candidates(const DoseSet& currents, const TrialData& data,
                              const DoseGrid& grid, const EquivalenceInterval& ei);

// Rule 4: drop every member inside sigma_E or sigma_D.
CandidateSet prune(CandidateSet cands, const TrialData& data, const DoseGrid& grid,
                   const EquivalenceInterval& ei);

// Rule 5: drop current DCs whose decision is not S; if nothing is left, fall
// back to the admissible set. DCs in `eliminated` (SR1) are never returned.
DoseSet finalize(CandidateSet& cands, const DoseSet& currents, const TrialData& data,
                 const DoseGrid& grid, const EquivalenceInterval& ei,
                 const DoseSet& eliminated = {});

struct RankedCandidate {
    DoseCombo dose;
    double utility = 0.0;
};

// Candidates with their Rule 6 utilities, best first (ties in lattice order).
std::vector<RankedCandidate> rank_candidates(const DoseSet& candidates, const TrialData& data,
                                             const DoseGrid& grid, const EquivalenceInterval& ei,
                                             double eps);

// Rule 6: take the `slots` highest utilities. When a tie group straddles the
// cut, members are drawn uniformly with `rng`; the rng is not touched
// otherwise. Throws domain_error on an empty candidate set.
std::vector<DoseCombo> select_next(const DoseSet& candidates, const TrialData& data,
                                   const DoseGrid& grid, const EquivalenceInterval& ei,
                                   double eps, int slots, Rng& rng);

// Tolerance under which two utilities are treated as tied.
inline constexpr double kUtilityTieTolerance = 1e-12;

}  // namespace mci33
