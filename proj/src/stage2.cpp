#include "mci33/stage2.hpp"

#include <algorithm>
#include <cmath>

#include "mci33/beta_inference.hpp"
#include "mci33/i3p3.hpp"

namespace mci33 {

std::string RuleNote::describe() const {
    std::string s = "Rule " + rule + " " + action + " " + to_string(dose);
    if (because) s += " (due to " + to_string(*because) + ")";
    return s;
}

Decision decision_at(const TrialData& data, const DoseCombo& dc, const EquivalenceInterval& ei) {
    return decide(data.n(dc), data.y(dc), ei);
}

ExclusionSets exclusion_sets(const TrialData& data, const DoseGrid& grid,
                             const EquivalenceInterval& ei) {
    ExclusionSets out;
    const auto combos = grid.combinations();
    for (const auto& tried : combos) {
        if (!data.tried(tried)) continue;
        const Decision d = decision_at(data, tried, ei);
        if (d == Decision::Stay) continue;
        for (const auto& other : combos) {
            if (d == Decision::Escalate && is_lower(other, tried)) out.too_low.insert(other);
            if (d == Decision::DeEscalate && is_higher(other, tried)) out.too_risky.insert(other);
        }
    }
    return out;
}

DoseSet admissible_set(const TrialData& data, const DoseGrid& grid, const EquivalenceInterval& ei) {
    const auto ex = exclusion_sets(data, grid, ei);
    DoseSet out;
    for (const auto& dc : grid.combinations()) {
        if (!ex.too_low.contains(dc) && !ex.too_risky.contains(dc)) out.insert(dc);
    }
    return out;
}

CandidateSet build_candidates(const DoseSet& currents, const TrialData& data,
                              const DoseGrid& grid, const EquivalenceInterval& ei) {
    if (currents.empty() || currents.size() > 2) {
        throw state_error("stage II: expected one or two current DCs");
    }
    CandidateSet out;
    auto add = [&](const DoseCombo& dc, const char* rule, const DoseCombo& src) {
        if (!grid.contains_combination(dc)) return;
        out.members.insert(dc);
        out.notes.push_back({rule, "add", dc, src});
    };
    auto decided_e_or_s = [&](const DoseCombo& dc) {
        return grid.contains_combination(dc) && data.tried(dc) &&
               decision_at(data, dc, ei) != Decision::DeEscalate;
    };
    auto untried = [&](const DoseCombo& dc) {
        return grid.contains_combination(dc) && !data.tried(dc);
    };

    for (const auto& c : currents) {
        if (!c.is_combination() || !grid.contains(c)) {
            throw state_error("stage II: current " + to_string(c) + " is not a combination DC");
        }
        if (!data.tried(c)) throw state_error("stage II: current " + to_string(c) + " has no data");
        const auto [i, j] = c;
        switch (decision_at(data, c, ei)) {
            case Decision::Escalate:
                add({i + 1, j}, "3.a", c);
                add({i, j + 1}, "3.a", c);
                break;
            case Decision::Stay:
                add({i, j}, "3.b", c);
                add({i + 1, j - 1}, "3.b", c);
                add({i - 1, j + 1}, "3.b", c);
                // One diagonal step further when the neighbour is tried and
                // not de-escalating while the next one is still untried.
                if (decided_e_or_s({i + 1, j - 1}) && untried({i + 2, j - 2})) {
                    add({i + 2, j - 2}, "3.b", c);
                }
                if (decided_e_or_s({i - 1, j + 1}) && untried({i - 2, j + 2})) {
                    add({i - 2, j + 2}, "3.b", c);
                }
                break;
            case Decision::DeEscalate:
                add({i - 1, j}, "3.c", c);
                add({i, j - 1}, "3.c", c);
                break;
        }
    }
    return out;
}

CandidateSet prune(CandidateSet cands, const TrialData& data, const DoseGrid& grid,
                   const EquivalenceInterval& ei) {
    cands.excluded = exclusion_sets(data, grid, ei);

    // Cite the first tried DC responsible for each removal.
    auto culprit = [&](const DoseCombo& dc, Decision want) -> std::optional<DoseCombo> {
        for (const auto& t : grid.combinations()) {
            if (!data.tried(t) || decision_at(data, t, ei) != want) continue;
            if (want == Decision::Escalate && is_lower(dc, t)) return t;
            if (want == Decision::DeEscalate && is_higher(dc, t)) return t;
        }
        return std::nullopt;
    };

    for (auto it = cands.members.begin(); it != cands.members.end();) {
        if (cands.excluded.too_low.contains(*it)) {
            cands.notes.push_back({"4.a", "remove", *it, culprit(*it, Decision::Escalate)});
            it = cands.members.erase(it);
        } else if (cands.excluded.too_risky.contains(*it)) {
            cands.notes.push_back({"4.b", "remove", *it, culprit(*it, Decision::DeEscalate)});
            it = cands.members.erase(it);
        } else {
            ++it;
        }
    }
    return cands;
}

DoseSet finalize(CandidateSet& cands, const DoseSet& currents, const TrialData& data,
                 const DoseGrid& grid, const EquivalenceInterval& ei, const DoseSet& eliminated) {
    for (const auto& dc : eliminated) {
        if (cands.members.erase(dc) > 0) cands.notes.push_back({"SR1", "remove", dc, std::nullopt});
    }
    if (!cands.members.empty()) {
        for (const auto& c : currents) {
            if (cands.members.contains(c) && data.tried(c) &&
                decision_at(data, c, ei) != Decision::Stay) {
                cands.members.erase(c);
                cands.notes.push_back({"5.a", "remove", c, std::nullopt});
            }
        }
    }
    if (cands.members.empty()) {
        for (const auto& dc : admissible_set(data, grid, ei)) {
            if (eliminated.contains(dc)) continue;
            cands.members.insert(dc);
            cands.notes.push_back({"5.b", "admit", dc, std::nullopt});
        }
    }
    return cands.members;
}

std::vector<RankedCandidate> rank_candidates(const DoseSet& candidates, const TrialData& data,
                                             const DoseGrid& grid, const EquivalenceInterval& ei,
                                             double eps) {
    std::vector<RankedCandidate> ranked;
    ranked.reserve(candidates.size());
    for (const auto& dc : candidates) {
        ranked.push_back({dc, utility(data.n(dc), data.y(dc), grid.dose_sum(dc), ei, eps)});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.utility > b.utility; });
    return ranked;
}

std::vector<DoseCombo> select_next(const DoseSet& candidates, const TrialData& data,
                                   const DoseGrid& grid, const EquivalenceInterval& ei,
                                   double eps, int slots, Rng& rng) {
    if (candidates.empty()) throw domain_error("stage II: no candidate DCs to select from");
    const auto ranked = rank_candidates(candidates, data, grid, ei, eps);

    std::vector<DoseCombo> chosen;
    std::size_t k = 0;
    while (k < ranked.size() && static_cast<int>(chosen.size()) < slots) {
        // Tie group [k, end).
        std::size_t end = k + 1;
        while (end < ranked.size() &&
               std::abs(ranked[k].utility - ranked[end].utility) <= kUtilityTieTolerance) {
            ++end;
        }
        std::vector<DoseCombo> group;
        for (std::size_t t = k; t < end; ++t) group.push_back(ranked[t].dose);
        const auto room = static_cast<std::size_t>(slots) - chosen.size();
        if (group.size() <= room) {
            chosen.insert(chosen.end(), group.begin(), group.end());
        } else {
            for (std::size_t pick = 0; pick < room; ++pick) {
                const auto r = pick + rng.index(group.size() - pick);
                std::swap(group[pick], group[r]);
                chosen.push_back(group[pick]);
            }
        }
        k = end;
    }
    return chosen;
}

}  // namespace mci33
