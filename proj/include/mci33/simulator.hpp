#pragma once

// Monte-Carlo operating characteristics.

#include <cstdint>
#include <string>
#include <vector>

#include "mci33/ingest.hpp"
#include "mci33/trial.hpp"

namespace mci33 {

// Runs one trial with DLT counts drawn from the scenario's true toxicities.
// Throws domain_error if the grids differ or Stage I needs margins the
// scenario does not have.
TrialResult simulate_trial(const Scenario& scenario, TrialConfig config, std::uint64_t seed);

struct OCSummary {
    int reps = 0;
    // Selection: correct / over / under by where the true toxicity of the
    // selected DC sits relative to the interval; none covers no selection.
    double pcs = 0.0, pos = 0.0, pus = 0.0, none = 0.0;
    double early_stop_rate = 0.0;
    // Allocation over combination patients only.
    double pca = 0.0, poa = 0.0, pua = 0.0;
    double mean_n = 0.0;
    double mean_stage1_n = 0.0;  // single-agent patients per trial
    Matrix selection;            // I x J selection frequency of each combination DC
    Matrix allocation;           // (I+1) x (J+1) mean patients per DC, margins included
};

OCSummary compute_ocs(const std::vector<TrialResult>& results, const Scenario& scenario);

// Trial r uses seed derive_seed(base_seed, r), so the outcome does not
// depend on `workers`. workers <= 0 picks the hardware concurrency.
std::vector<TrialResult> run_trials(const Scenario& scenario, const TrialConfig& config, int reps,
                                    std::uint64_t base_seed, int workers = 0);
OCSummary run_replications(const Scenario& scenario, const TrialConfig& config, int reps,
                           std::uint64_t base_seed, int workers = 0);

// Comma-separated exports with fixed column order and 6-decimal values.
std::string oc_csv(const OCSummary& oc, const std::string& scenario, const std::string& variant,
                   std::uint64_t seed);
std::string dc_csv(const OCSummary& oc, const Scenario& scenario);

}  // namespace mci33
