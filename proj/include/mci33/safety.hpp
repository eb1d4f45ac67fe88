#pragma once

#include "mci33/beta_inference.hpp"
#include "mci33/core.hpp"

namespace mci33 {

// SR1: every tried DC (single-agent or combination) with n >= 3 and
// Pr(p > p_T | data) > eta is unacceptable, together with every DC higher
// than it. Returns the upward closure over the whole lattice.
DoseSet sr1_scan(const TrialData& data, const DoseGrid& grid, double target, double eta,
                 const BetaPrior& prior = BetaPrior::decision());

// The lowest dose is gone: (1,1), or either agent's first single-agent dose.
bool sr1_stop_check(const DoseSet& eliminated);

// SR2: true (stop) when the admissible set is empty.
bool sr2_check(const TrialData& data, const DoseGrid& grid, const EquivalenceInterval& ei);

inline constexpr int kSr1MinPatients = 3;

}  // namespace mci33
