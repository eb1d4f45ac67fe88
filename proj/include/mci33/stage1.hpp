#pragma once

// Parallel single-agent escalation. Each agent climbs its own ladder with the
// i3+3 rule and stops at the first dose that is not an escalation.

#include <optional>

#include "mci33/core.hpp"

namespace mci33 {

enum class Agent { A, B };

struct AgentTrack {
    Agent agent = Agent::A;
    int top_level = 1;      // I for drug A, J for drug B
    int current_level = 1;  // next dose to treat, while not finished
    // Level of the first S/D decision, or top_level + 1 if every dose escalated.
    std::optional<int> first_non_escalation;

    static AgentTrack start(Agent agent, int top_level);

    bool finished() const { return first_non_escalation.has_value(); }
    // The highest dose cleared by escalation (i0 or j0).
    int cleared_level() const;
    // Lattice point of the current dose, e.g. (3,0) for drug A level 3.
    DoseCombo current_dose() const;

    friend bool operator==(const AgentTrack&, const AgentTrack&) = default;
};

struct CohortOutcome {
    DoseCombo dose;
    int n = 0;
    int y = 0;
};

// Advances a track given the cumulative data at its current dose.
// Throws state_error if the track is finished or the outcome is for a
// different dose.
AgentTrack stage1_step(const AgentTrack& track, const CohortOutcome& cumulative,
                       const EquivalenceInterval& ei);

// {(i0,1), (1,j0)} when both cleared levels are >= 1, otherwise {(1,1)}.
DoseSet starting_dcs(int i0, int j0);

}  // namespace mci33
