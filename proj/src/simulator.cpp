#include "mci33/simulator.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

namespace mci33 {

TrialResult simulate_trial(const Scenario& scenario, TrialConfig config, std::uint64_t seed) {
    if (!(scenario.grid == config.grid)) throw domain_error("scenario grid does not match the config grid");
    if (config.stage1_enabled && !scenario.has_margins) {
        throw domain_error("scenario " + scenario.name + " has no single-agent margins but Stage I is enabled");
    }
    config.seed = seed;
    Trial trial(config);
    Rng outcomes(derive_seed(seed, 0xD17));
    while (!trial.terminal()) {
        std::vector<CohortOutcome> obs;
        for (const auto& c : trial.pending()) {
            obs.push_back({c.dose, c.size, outcomes.binomial(c.size, scenario.truth(c.dose))});
        }
        trial.observe(obs);
    }
    return trial.result();
}

OCSummary compute_ocs(const std::vector<TrialResult>& results, const Scenario& scenario) {
    const auto ei = scenario.ei();
    const int levels_a = scenario.grid.levels_a(), levels_b = scenario.grid.levels_b();
    OCSummary oc;
    oc.reps = static_cast<int>(results.size());
    oc.selection = Matrix(levels_a, levels_b);
    oc.allocation = Matrix(levels_a + 1, levels_b + 1);
    if (results.empty()) return oc;

    // -1 under, 0 correct, +1 over.
    auto position = [&](const DoseCombo& dc) {
        const double p = scenario.truth(dc);
        if (ei.contains(p)) return 0;
        return p > ei.upper() ? 1 : -1;
    };

    double correct = 0, over = 0, under = 0, none = 0, stopped = 0;
    double alloc_c = 0, alloc_o = 0, alloc_u = 0, total_n = 0, stage1_n = 0;
    for (const auto& r : results) {
        if (r.stopped_early) stopped += 1;
        if (!r.mtdc) {
            none += 1;
        } else {
            oc.selection(r.mtdc->i - 1, r.mtdc->j - 1) += 1;
            const int pos = position(*r.mtdc);
            (pos == 0 ? correct : pos > 0 ? over : under) += 1;
        }
        for (const auto& dc : scenario.grid.lattice()) {
            const int n = r.data.n(dc);
            oc.allocation(dc.i, dc.j) += n;
            total_n += n;
            if (!dc.is_combination()) {
                stage1_n += n;
                continue;
            }
            const int pos = position(dc);
            (pos == 0 ? alloc_c : pos > 0 ? alloc_o : alloc_u) += n;
        }
    }
    const double reps = static_cast<double>(results.size());
    oc.pcs = correct / reps;
    oc.pos = over / reps;
    oc.pus = under / reps;
    oc.none = none / reps;
    oc.early_stop_rate = stopped / reps;
    const double combo_n = alloc_c + alloc_o + alloc_u;
    if (combo_n > 0) {
        oc.pca = alloc_c / combo_n;
        oc.poa = alloc_o / combo_n;
        oc.pua = alloc_u / combo_n;
    }
    oc.mean_n = total_n / reps;
    oc.mean_stage1_n = stage1_n / reps;
    for (double& v : oc.selection.values) v /= reps;
    for (double& v : oc.allocation.values) v /= reps;
    return oc;
}

std::vector<TrialResult> run_trials(const Scenario& scenario, const TrialConfig& config, int reps,
                                    std::uint64_t base_seed, int workers) {
    if (reps < 1) throw domain_error("reps must be >= 1");
    if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, reps);

    std::vector<TrialResult> results(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (int r = next++; r < reps && !failed; r = next++) {
            try {
                results[static_cast<std::size_t>(r)] =
                    simulate_trial(scenario, config, derive_seed(base_seed, static_cast<std::uint64_t>(r)));
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

OCSummary run_replications(const Scenario& scenario, const TrialConfig& config, int reps,
                           std::uint64_t base_seed, int workers) {
    return compute_ocs(run_trials(scenario, config, reps, base_seed, workers), scenario);
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string oc_csv(const OCSummary& oc, const std::string& scenario, const std::string& variant,
                   std::uint64_t seed) {
    std::ostringstream out;
    out << "scenario,variant,reps,seed,pcs,pos,pus,none,early_stop_rate,pca,poa,pua,mean_n,mean_stage1_n\n";
    out << scenario << ',' << variant << ',' << oc.reps << ',' << seed << ',' << fixed6(oc.pcs) << ','
        << fixed6(oc.pos) << ',' << fixed6(oc.pus) << ',' << fixed6(oc.none) << ',' << fixed6(oc.early_stop_rate)
        << ',' << fixed6(oc.pca) << ',' << fixed6(oc.poa) << ',' << fixed6(oc.pua) << ',' << fixed6(oc.mean_n)
        << ',' << fixed6(oc.mean_stage1_n) << '\n';
    return out.str();
}

std::string dc_csv(const OCSummary& oc, const Scenario& scenario) {
    std::ostringstream out;
    out << "i,j,true_tox,in_ei,selection,mean_patients\n";
    const auto ei = scenario.ei();
    for (const auto& dc : scenario.grid.lattice()) {
        const double truth = scenario.truth(dc);
        const double sel = dc.is_combination() ? oc.selection(dc.i - 1, dc.j - 1) : 0.0;
        out << dc.i << ',' << dc.j << ',' << (std::isnan(truth) ? std::string("") : fixed6(truth)) << ','
            << (std::isnan(truth) ? 0 : ei.contains(truth) ? 1 : 0) << ',' << fixed6(sel) << ','
            << fixed6(oc.allocation(dc.i, dc.j)) << '\n';
    }
    return out.str();
}

}  // namespace mci33
