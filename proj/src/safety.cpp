#include "mci33/safety.hpp"

#include "mci33/stage2.hpp"

namespace mci33 {

DoseSet sr1_scan(const TrialData& data, const DoseGrid& grid, double target, double eta,
                 const BetaPrior& prior) {
    DoseSet out;
    const auto lattice = grid.lattice();
    for (const auto& dc : data.tried_doses()) {
        if (data.n(dc) < kSr1MinPatients) continue;
        if (!(exceed_prob(data.n(dc), data.y(dc), target, prior) > eta)) continue;
        out.insert(dc);
        for (const auto& other : lattice) {
            if (is_higher(other, dc)) out.insert(other);
        }
    }
    return out;
}

bool sr1_stop_check(const DoseSet& eliminated) {
    return eliminated.contains({1, 1}) || eliminated.contains({1, 0}) ||
           eliminated.contains({0, 1});
}

bool sr2_check(const TrialData& data, const DoseGrid& grid, const EquivalenceInterval& ei) {
    return admissible_set(data, grid, ei).empty();
}

}  // namespace mci33
