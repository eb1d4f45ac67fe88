#include "mci33/stage1.hpp"

#include "mci33/i3p3.hpp"

namespace mci33 {

AgentTrack AgentTrack::start(Agent agent, int top_level) {
    if (top_level < 1) throw domain_error("stage I: agent needs at least one dose level");
    AgentTrack t;
    t.agent = agent;
    t.top_level = top_level;
    t.current_level = 1;
    return t;
}

int AgentTrack::cleared_level() const {
    if (!finished()) throw state_error("stage I: track still escalating");
    return *first_non_escalation - 1;
}

DoseCombo AgentTrack::current_dose() const {
    return agent == Agent::A ? DoseCombo{current_level, 0} : DoseCombo{0, current_level};
}

AgentTrack stage1_step(const AgentTrack& track, const CohortOutcome& cumulative,
                       const EquivalenceInterval& ei) {
    if (track.finished()) throw state_error("stage I: track already finished");
    if (cumulative.dose != track.current_dose()) {
        throw state_error("stage I: outcome at " + to_string(cumulative.dose) +
                          " but the track is at " + to_string(track.current_dose()));
    }
    AgentTrack next = track;
    if (decide(cumulative.n, cumulative.y, ei) == Decision::Escalate) {
        if (track.current_level == track.top_level) {
            next.first_non_escalation = track.top_level + 1;
        } else {
            next.current_level = track.current_level + 1;
        }
    } else {
        next.first_non_escalation = track.current_level;
    }
    return next;
}

DoseSet starting_dcs(int i0, int j0) {
    if (i0 >= 1 && j0 >= 1) return {DoseCombo{i0, 1}, DoseCombo{1, j0}};
    return {DoseCombo{1, 1}};
}

}  // namespace mci33
