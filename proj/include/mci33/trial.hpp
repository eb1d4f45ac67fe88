#pragma once

// The trial state machine. A Trial owns its state and is the only thing that
// mutates it; every mutation is recorded in an append-only event log from
// which the state can be rebuilt exactly.
//
//   Stage I  -> Stage II -> (Stage III) -> Completed | Stopped

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mci33/core.hpp"
#include "mci33/isotonic.hpp"
#include "mci33/model.hpp"
#include "mci33/rng.hpp"
#include "mci33/stage1.hpp"
#include "mci33/stage2.hpp"

namespace mci33 {

using json = nlohmann::json;

enum class Stage { I, II, III, Stopped, Completed };
enum class Variant { TwoStage, ThreeStage };

std::string to_string(Stage s);
std::string to_string(Variant v);

struct TrialConfig {
    DoseGrid grid{4, 5};
    double target = 0.3;
    double eps_low = 0.05;
    double eps_high = 0.05;
    int cohort_size = 3;
    int max_total_n = 96;
    Variant variant = Variant::TwoStage;
    double monitor_eta = 0.4;
    double sr1_eta = 0.95;
    double utility_eps = 1e-6;
    SamplerConfig sampler;
    PriorSpec prior;
    std::uint64_t seed = 0;
    bool stage1_enabled = true;
    std::optional<DoseSet> starting_dcs;
    bool multiple_mtdc = false;

    EquivalenceInterval ei() const { return EquivalenceInterval(target, eps_low, eps_high); }
    // Throws domain_error naming the offending field.
    void validate() const;

    friend bool operator==(const TrialConfig&, const TrialConfig&) = default;
};

struct CohortAssignment {
    DoseCombo dose;
    int size = 0;
    friend bool operator==(const CohortAssignment&, const CohortAssignment&) = default;
};

struct TrialResult {
    std::optional<DoseCombo> mtdc;
    DoseSet mtdc_set;  // filled when multiple_mtdc is on
    bool stopped_early = false;
    std::string stop_reason;
    bool provisional = false;
    TrialData data;
    Matrix estimates;  // isotonic estimates over the combination DCs
};

class Trial {
public:
    explicit Trial(TrialConfig config);

    // Rebuilds a trial from its event log by re-applying the recorded
    // outcomes. The first event must be "created". Recorded derived events
    // are not trusted; compare events() against the input to detect drift.
    static Trial from_events(const std::vector<json>& events);

    const TrialConfig& config() const { return config_; }
    Stage stage() const { return stage_; }
    bool terminal() const { return stage_ == Stage::Stopped || stage_ == Stage::Completed; }
    const TrialData& data() const { return data_; }
    const DoseSet& currents() const { return currents_; }
    const DoseSet& eliminated() const { return eliminated_; }
    int enrolled() const { return enrolled_; }
    const AgentTrack& track_a() const { return track_a_; }
    const AgentTrack& track_b() const { return track_b_; }
    const std::string& stop_reason() const { return stop_reason_; }

    // The cohorts awaiting outcomes; empty once the trial is terminal.
    const std::vector<CohortAssignment>& pending() const { return pending_; }
    // Sequence number of the pending assignment (1 for the first).
    int pending_seq() const { return seq_; }

    // Applies one outcome per pending cohort (any order). Throws state_error
    // when the trial is terminal or the outcomes do not match the pending
    // assignment, domain_error when a count is invalid.
    void observe(const std::vector<CohortOutcome>& outcomes);

    // Final (or, with force, provisional) MTDC report. Throws state_error for
    // an unfinished trial without force.
    TrialResult result(bool force = false) const;

    const std::vector<json>& events() const { return events_; }

    // Full state view served by GET /trials/{id}.
    json snapshot() const;
    // Recommendation, candidate and admissible sets, scores and safety flags.
    // The CLI decide command prints exactly this; the service returns it.
    json decision_report() const;

private:
    void emit(json ev);
    void stop(const std::string& reason);
    void complete();
    void plan_stage1();
    void enter_stage2();
    void plan_stage2();
    void step_stage2();
    void plan_stage3();
    bool budget_exhausted() const;
    int cohorts_left() const;
    DoseSet selectable_admissible() const;
    TrialResult compute_result(bool provisional) const;
    std::uint64_t fit_seed(std::uint64_t salt) const;

    TrialConfig config_;
    EquivalenceInterval ei_;
    Stage stage_ = Stage::I;
    TrialData data_;
    DoseSet currents_;
    DoseSet eliminated_;
    int enrolled_ = 0;
    AgentTrack track_a_;
    AgentTrack track_b_;
    std::vector<CohortAssignment> pending_;
    int seq_ = 0;
    int step_ = 0;
    std::string stop_reason_;
    Rng tie_rng_;
    DoseSet last_candidates_;
    std::vector<RankedCandidate> last_ranking_;  // utilities, or model probabilities in Stage III
    bool model_scores_ = false;
    std::vector<json> events_;
};

// JSON forms shared by the log, the CLI and the service.
json to_json(const DoseCombo& dc);
DoseCombo dose_from_json(const json& j);
json to_json(const DoseSet& s);
json to_json(const TrialResult& r, const DoseGrid& grid);

}  // namespace mci33
