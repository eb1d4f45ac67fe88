#include "mci33/trial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mci33/i3p3.hpp"
#include "mci33/ingest.hpp"
#include "mci33/safety.hpp"

namespace mci33 {

std::string to_string(Stage s) {
    switch (s) {
        case Stage::I: return "I";
        case Stage::II: return "II";
        case Stage::III: return "III";
        case Stage::Stopped: return "stopped";
        case Stage::Completed: return "completed";
    }
    return "?";
}

std::string to_string(Variant v) { return v == Variant::TwoStage ? "two-stage" : "three-stage"; }

void TrialConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& what) {
        throw domain_error(field + ": " + what);
    };
    if (!(target > 0.0 && target < 1.0)) fail("p_T", "must lie in (0,1)");
    if (!(eps_low >= 0.0) || !std::isfinite(eps_low)) fail("eps1", "must be >= 0");
    if (!(eps_high >= 0.0) || !std::isfinite(eps_high)) fail("eps2", "must be >= 0");
    if (!(target - eps_low > 0.0 && target + eps_high < 1.0)) fail("eps1/eps2", "interval must stay inside (0,1)");
    if (cohort_size < 1) fail("cohort_size", "must be >= 1");
    if (max_total_n < cohort_size) fail("max_total_n", "must be >= cohort_size");
    if (!(monitor_eta >= 0.0 && monitor_eta < 1.0)) fail("monitor_eta", "must lie in [0,1)");
    if (!(sr1_eta > 0.0 && sr1_eta < 1.0)) fail("sr1_eta", "must lie in (0,1)");
    if (!(utility_eps >= 0.0) || !std::isfinite(utility_eps)) fail("eps", "must be >= 0");
    if (sampler.thin < 1) fail("sampler.thin", "must be >= 1");
    if (sampler.burn_in < 0) fail("sampler.burn_in", "must be >= 0");
    if (sampler.iterations <= sampler.burn_in) fail("sampler.iterations", "must exceed burn_in");
    if (!(prior.intercept_var > 0.0)) fail("prior.intercept_var", "must be > 0");
    if (!(prior.slope_log_var > 0.0)) fail("prior.slope_log_var", "must be > 0");
    if (!(prior.extra_var > 0.0)) fail("prior.extra_var", "must be > 0");
    if (stage1_enabled && starting_dcs) fail("starting_dcs", "only allowed when stage1_enabled is false");
    if (!stage1_enabled) {
        if (!starting_dcs || starting_dcs->empty()) fail("starting_dcs", "required when stage1_enabled is false");
        if (starting_dcs->size() > 2) fail("starting_dcs", "at most two DCs");
        for (const auto& dc : *starting_dcs) {
            if (!grid.contains_combination(dc)) fail("starting_dcs", to_string(dc) + " is not a combination DC of the grid");
        }
    }
}

json to_json(const DoseCombo& dc) { return json::array({dc.i, dc.j}); }

DoseCombo dose_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw domain_error("dose must be a [i, j] pair of integers");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

json to_json(const DoseSet& s) {
    json out = json::array();
    for (const auto& dc : s) out.push_back(to_json(dc));
    return out;
}

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json data_json(const TrialData& d) {
    json n = json::array(), y = json::array();
    for (int i = 0; i <= d.levels_a(); ++i) {
        json rn = json::array(), ry = json::array();
        for (int j = 0; j <= d.levels_b(); ++j) {
            const bool origin = i == 0 && j == 0;
            rn.push_back(origin ? 0 : d.n({i, j}));
            ry.push_back(origin ? 0 : d.y({i, j}));
        }
        n.push_back(rn);
        y.push_back(ry);
    }
    return {{"n", n}, {"y", y}};
}

json track_json(const AgentTrack& t) {
    json out{{"level", t.current_level}, {"finished", t.finished()}};
    if (t.finished()) out["first_non_escalation"] = *t.first_non_escalation;
    return out;
}

json cohorts_json(const std::vector<CohortAssignment>& cohorts) {
    json out = json::array();
    for (const auto& c : cohorts) out.push_back({{"dose", to_json(c.dose)}, {"size", c.size}});
    return out;
}

}  // namespace

json to_json(const TrialResult& r, const DoseGrid& grid) {
    json out;
    out["mtdc"] = r.mtdc ? to_json(*r.mtdc) : json(nullptr);
    out["mtdc_set"] = to_json(r.mtdc_set);
    out["stopped_early"] = r.stopped_early;
    out["stop_reason"] = r.stop_reason;
    out["provisional"] = r.provisional;
    out["data"] = data_json(r.data);
    out["estimates"] = r.estimates.rows > 0 ? matrix_json(r.estimates) : json::array();
    out["levels"] = {grid.levels_a(), grid.levels_b()};
    return out;
}

Trial::Trial(TrialConfig config)
    : config_(std::move(config)),
      ei_(config_.ei()),
      data_(config_.grid.levels_a(), config_.grid.levels_b()),
      track_a_(AgentTrack::start(Agent::A, config_.grid.levels_a())),
      track_b_(AgentTrack::start(Agent::B, config_.grid.levels_b())),
      tie_rng_(derive_seed(config_.seed, 0x71E)) {
    config_.validate();
    emit({{"type", "created"}, {"config", config_to_json(config_)}});
    if (config_.stage1_enabled) {
        plan_stage1();
    } else {
        stage_ = Stage::II;
        emit({{"type", "stage"}, {"to", "II"}, {"starting", to_json(*config_.starting_dcs)}});
        currents_ = *config_.starting_dcs;
        plan_stage2();
    }
}

Trial Trial::from_events(const std::vector<json>& events) {
    if (events.empty() || events.front().value("type", "") != "created") {
        throw domain_error("event log must start with a created event");
    }
    Trial t(parse_config(events.front().at("config")));
    for (std::size_t k = 1; k < events.size(); ++k) {
        const auto& ev = events[k];
        if (ev.value("type", "") != "outcome") continue;
        std::vector<CohortOutcome> outs;
        for (const auto& c : ev.at("cohorts")) {
            outs.push_back({dose_from_json(c.at("dose")), c.at("n").get<int>(), c.at("y").get<int>()});
        }
        t.observe(outs);
    }
    return t;
}

void Trial::emit(json ev) { events_.push_back(std::move(ev)); }

std::uint64_t Trial::fit_seed(std::uint64_t salt) const {
    return derive_seed(derive_seed(config_.seed, 0xF17), static_cast<std::uint64_t>(step_) * 8 + salt);
}

int Trial::cohorts_left() const { return (config_.max_total_n - enrolled_) / config_.cohort_size; }

bool Trial::budget_exhausted() const { return cohorts_left() < 1; }

DoseSet Trial::selectable_admissible() const {
    DoseSet out;
    for (const auto& dc : admissible_set(data_, config_.grid, ei_))
        if (!eliminated_.contains(dc)) out.insert(dc);
    return out;
}

void Trial::stop(const std::string& reason) {
    stage_ = Stage::Stopped;
    stop_reason_ = reason;
    pending_.clear();
    emit({{"type", "stop"}, {"reason", reason}});
    emit({{"type", "result"}, {"result", to_json(compute_result(false), config_.grid)}});
}

void Trial::complete() {
    stage_ = Stage::Completed;
    pending_.clear();
    emit({{"type", "completed"}, {"enrolled", enrolled_}});
    emit({{"type", "result"}, {"result", to_json(compute_result(false), config_.grid)}});
}

void Trial::plan_stage1() {
    // With room for a single cohort, drug A goes first.
    int room = cohorts_left();
    pending_.clear();
    for (const auto* t : {&track_a_, &track_b_}) {
        if (t->finished() || room < 1) continue;
        pending_.push_back({t->current_dose(), config_.cohort_size});
        --room;
    }
    ++seq_;
    emit({{"type", "assignment"}, {"seq", seq_}, {"stage", "I"}, {"cohorts", cohorts_json(pending_)}});
}

void Trial::enter_stage2() {
    const int i0 = track_a_.cleared_level();
    const int j0 = track_b_.cleared_level();
    stage_ = Stage::II;
    currents_ = starting_dcs(i0, j0);
    emit({{"type", "stage"}, {"to", "II"}, {"i0", i0}, {"j0", j0}, {"starting", to_json(currents_)}});
    for (auto it = currents_.begin(); it != currents_.end();) {
        if (eliminated_.contains(*it)) {
            emit({{"type", "rule"}, {"rule", "SR1"}, {"action", "remove"}, {"dose", to_json(*it)},
                  {"text", RuleNote{"SR1", "remove", *it, std::nullopt}.describe()}});
            it = currents_.erase(it);
        } else {
            ++it;
        }
    }
    if (!currents_.empty()) {
        plan_stage2();
    } else if (selectable_admissible().empty()) {
        stop("SR2: no admissible dose combination remains");
    } else {
        step_stage2();  // empty candidate set, so Rule 5.b picks
    }
}

// One generalized up-and-down step from `currents_`: build, prune and
// finalize the candidate set, then assign up to two cohorts by utility.
void Trial::step_stage2() {
    auto cands = build_candidates(currents_, data_, config_.grid, ei_);
    cands = prune(std::move(cands), data_, config_.grid, ei_);
    finalize(cands, currents_, data_, config_.grid, ei_, eliminated_);
    for (const auto& note : cands.notes) {
        json ev{{"type", "rule"}, {"rule", note.rule}, {"action", note.action}, {"dose", to_json(note.dose)}};
        if (note.because) ev["because"] = to_json(*note.because);
        ev["text"] = note.describe();
        emit(std::move(ev));
    }
    last_candidates_ = cands.members;
    const int slots = std::min(2, cohorts_left());
    const auto picks =
        select_next(cands.members, data_, config_.grid, ei_, config_.utility_eps, slots, tie_rng_);
    last_ranking_ = rank_candidates(cands.members, data_, config_.grid, ei_, config_.utility_eps);
    json ranking = json::array();
    for (const auto& r : last_ranking_) ranking.push_back({{"dose", to_json(r.dose)}, {"utility", r.utility}});
    json selected = json::array();
    for (const auto& dc : picks) selected.push_back(to_json(dc));
    emit({{"type", "candidates"},
          {"members", to_json(cands.members)},
          {"ranking", ranking},
          {"selected", selected}});
    currents_ = DoseSet(picks.begin(), picks.end());
    pending_.clear();
    for (const auto& dc : currents_) pending_.push_back({dc, config_.cohort_size});
    ++seq_;
    emit({{"type", "assignment"}, {"seq", seq_}, {"stage", "II"}, {"cohorts", cohorts_json(pending_)}});
}

// Assigns cohorts to `currents_` (the DCs chosen for the next step), trimmed
// to the remaining budget by utility.
void Trial::plan_stage2() {
    const int slots = std::min<int>(static_cast<int>(currents_.size()), cohorts_left());
    last_candidates_ = currents_;
    last_ranking_ = rank_candidates(currents_, data_, config_.grid, ei_, config_.utility_eps);
    if (slots < static_cast<int>(currents_.size())) {
        const auto keep = select_next(currents_, data_, config_.grid, ei_, config_.utility_eps, slots, tie_rng_);
        currents_ = DoseSet(keep.begin(), keep.end());
    }
    pending_.clear();
    for (const auto& dc : currents_) pending_.push_back({dc, config_.cohort_size});
    ++seq_;
    emit({{"type", "assignment"}, {"seq", seq_}, {"stage", to_string(stage_)}, {"cohorts", cohorts_json(pending_)}});
}

void Trial::plan_stage3() {
    const DoseSet pool = selectable_admissible();
    const auto post = fit(ModelKind::Plain, data_, config_.grid, config_.prior, config_.sampler, fit_seed(2));
    last_candidates_ = pool;
    model_scores_ = true;
    last_ranking_.clear();
    for (const auto& dc : pool) last_ranking_.push_back({dc, post.interval_prob(dc, ei_)});
    std::stable_sort(last_ranking_.begin(), last_ranking_.end(),
                     [](const auto& a, const auto& b) { return a.utility > b.utility; });
    Rng rng(fit_seed(3));
    const DoseCombo pick = stage3_select(post, pool, ei_, rng);
    json scores = json::array();
    for (const auto& r : last_ranking_) scores.push_back({{"dose", to_json(r.dose)}, {"probability", r.utility}});
    emit({{"type", "model"}, {"selected", to_json(pick)}, {"scores", scores}});
    currents_ = {pick};
    pending_ = {{pick, config_.cohort_size}};
    ++seq_;
    emit({{"type", "assignment"}, {"seq", seq_}, {"stage", "III"}, {"cohorts", cohorts_json(pending_)}});
}

void Trial::observe(const std::vector<CohortOutcome>& outcomes) {
    if (terminal()) throw state_error("trial is " + to_string(stage_) + "; no outcomes expected");
    if (outcomes.size() != pending_.size()) {
        throw state_error("expected " + std::to_string(pending_.size()) + " cohort outcome(s), got " +
                          std::to_string(outcomes.size()));
    }
    std::map<DoseCombo, int> expected;
    for (const auto& p : pending_) expected[p.dose] = p.size;
    std::map<DoseCombo, const CohortOutcome*> got;
    for (const auto& o : outcomes) {
        if (!expected.contains(o.dose)) throw state_error("no cohort assigned at " + to_string(o.dose));
        if (!got.emplace(o.dose, &o).second) throw state_error("duplicate outcome for " + to_string(o.dose));
        if (o.n < 1 || o.n > expected[o.dose]) {
            throw domain_error("outcome at " + to_string(o.dose) + ": n must be in [1, " +
                               std::to_string(expected[o.dose]) + "]");
        }
        if (o.y < 0 || o.y > o.n) throw domain_error("outcome at " + to_string(o.dose) + ": y must be in [0, n]");
    }

    ++step_;
    json cohorts = json::array();
    for (const auto& p : pending_) {
        const auto* o = got.at(p.dose);
        cohorts.push_back({{"dose", to_json(o->dose)}, {"n", o->n}, {"y", o->y}});
    }
    emit({{"type", "outcome"}, {"seq", seq_}, {"cohorts", cohorts}});

    for (const auto& p : pending_) {
        const auto* o = got.at(p.dose);
        data_.add(o->dose, o->n, o->y);
        enrolled_ += o->n;
    }
    for (const auto& p : pending_) {
        const int n = data_.n(p.dose), y = data_.y(p.dose);
        emit({{"type", "decision"},
              {"dose", to_json(p.dose)},
              {"n", n},
              {"y", y},
              {"decision", std::string(1, to_char(decide(n, y, ei_)))}});
    }

    if (stage_ == Stage::I) {
        for (auto* t : {&track_a_, &track_b_}) {
            if (t->finished() || !got.contains(t->current_dose())) continue;
            const auto dose = t->current_dose();
            *t = stage1_step(*t, {dose, data_.n(dose), data_.y(dose)}, ei_);
        }
    }

    // Safety rules, after every cohort.
    const DoseSet scan = sr1_scan(data_, config_.grid, config_.target, config_.sr1_eta);
    DoseSet fresh;
    for (const auto& dc : scan)
        if (eliminated_.insert(dc).second) fresh.insert(dc);
    if (!fresh.empty()) emit({{"type", "eliminated"}, {"rule", "SR1"}, {"doses", to_json(fresh)}});
    if (sr1_stop_check(eliminated_)) {
        stop("SR1: the lowest dose is unacceptably toxic");
        return;
    }
    if (selectable_admissible().empty()) {
        stop("SR2: no admissible dose combination remains");
        return;
    }

    // A Stage I track whose next dose was eliminated ends there.
    for (auto* t : {&track_a_, &track_b_}) {
        if (stage_ == Stage::I && !t->finished() && eliminated_.contains(t->current_dose())) {
            t->first_non_escalation = t->current_level;
        }
    }

    if (budget_exhausted()) {
        complete();
        return;
    }

    switch (stage_) {
        case Stage::I:
            if (track_a_.finished() && track_b_.finished()) {
                enter_stage2();
            } else {
                plan_stage1();
            }
            return;
        case Stage::II: {
            if (config_.variant == Variant::ThreeStage) {
                const auto post = fit(ModelKind::ChangePoint, data_, config_.grid, config_.prior,
                                      config_.sampler, fit_seed(1));
                const auto reading = monitor(post, ei_, config_.monitor_eta);
                emit({{"type", "monitor"},
                      {"best", to_json(reading.best)},
                      {"probability", reading.probability},
                      {"triggered", reading.triggered}});
                if (reading.triggered) {
                    stage_ = Stage::III;
                    emit({{"type", "stage"}, {"to", "III"}});
                    plan_stage3();
                    return;
                }
            }
            step_stage2();
            return;
        }
        case Stage::III:
            plan_stage3();
            return;
        case Stage::Stopped:
        case Stage::Completed:
            return;
    }
}

TrialResult Trial::compute_result(bool provisional) const {
    TrialResult r;
    r.data = data_;
    r.provisional = provisional;
    r.stopped_early = stage_ == Stage::Stopped;
    r.stop_reason = stop_reason_;

    bool any_combo = false;
    for (const auto& dc : config_.grid.combinations()) any_combo = any_combo || data_.tried(dc);
    if (!any_combo) return r;

    const auto fitted = isotonic_2d(posterior_means(data_), isotonic_weights(data_));
    r.estimates = fitted.estimates;
    if (r.stopped_early) return r;

    Rng rng(derive_seed(config_.seed, 0x5E1));
    r.mtdc = select_mtdc(data_, fitted, config_.grid, config_.target, eliminated_, rng);
    if (config_.multiple_mtdc) r.mtdc_set = select_mtdc_multiple(data_, fitted, ei_, eliminated_);
    return r;
}

TrialResult Trial::result(bool force) const {
    if (!terminal() && !force) throw state_error("trial is still running; finalize with force for a provisional report");
    return compute_result(!terminal());
}

json Trial::snapshot() const {
    json s;
    s["stage"] = to_string(stage_);
    s["variant"] = to_string(config_.variant);
    s["enrolled"] = enrolled_;
    s["max_total_n"] = config_.max_total_n;
    s["cohorts_left"] = terminal() ? 0 : cohorts_left();
    s["data"] = data_json(data_);
    s["currents"] = to_json(currents_);
    s["eliminated"] = to_json(eliminated_);
    s["tracks"] = {{"A", track_json(track_a_)}, {"B", track_json(track_b_)}};

    json rec = json::array();
    for (const auto& p : pending_) rec.push_back({{"dose", to_json(p.dose)}, {"size", p.size}});
    s["recommendation"] = {{"seq", terminal() ? json(nullptr) : json(seq_)}, {"cohorts", rec}};

    s["candidates"] = to_json(last_candidates_);
    s["admissible"] = to_json(selectable_admissible());
    json scores = json::array();
    const char* key = model_scores_ ? "probability" : "utility";
    for (const auto& r : last_ranking_) scores.push_back({{"dose", to_json(r.dose)}, {key, r.utility}});
    s["scores"] = scores;

    json safety;
    safety["sr1_eliminated"] = to_json(eliminated_);
    safety["sr1_stop"] = sr1_stop_check(eliminated_);
    safety["sr2_stop"] = selectable_admissible().empty();
    s["safety"] = safety;
    s["stop_reason"] = stop_reason_.empty() ? json(nullptr) : json(stop_reason_);
    s["result"] = terminal() ? to_json(compute_result(false), config_.grid) : json(nullptr);
    return s;
}

json Trial::decision_report() const {
    const json s = snapshot();
    json out;
    for (const char* key : {"stage", "recommendation", "currents", "candidates", "admissible", "scores", "safety",
                            "stop_reason"}) {
        out[key] = s[key];
    }
    return out;
}

}  // namespace mci33
