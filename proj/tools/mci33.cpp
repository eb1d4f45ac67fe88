// mci33: simulate, replay, decide, record, serve.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mci33/eventlog.hpp"
#include "mci33/ingest.hpp"
#include "mci33/service.hpp"
#include "mci33/simulator.hpp"

namespace fs = std::filesystem;
using namespace mci33;

namespace {

constexpr int kUsage = 2;

std::string describe(const json& ev) {
    const auto type = ev.value("type", "");
    std::ostringstream out;
    auto dose = [](const json& d) { return to_string(dose_from_json(d)); };
    auto doses = [&](const json& arr) {
        std::string s = "{";
        for (std::size_t k = 0; k < arr.size(); ++k) s += (k ? ", " : "") + dose(arr[k]);
        return s + "}";
    };
    if (type == "created") {
        out << "created: " << ev.at("config").dump();
    } else if (type == "assignment") {
        out << "seq " << ev.at("seq").get<int>() << " [stage " << ev.at("stage").get<std::string>() << "] assign";
        for (const auto& c : ev.at("cohorts")) out << ' ' << dose(c.at("dose")) << 'x' << c.at("size").get<int>();
    } else if (type == "outcome") {
        out << "  outcome seq " << ev.at("seq").get<int>() << ':';
        for (const auto& c : ev.at("cohorts"))
            out << ' ' << dose(c.at("dose")) << " n=" << c.at("n").get<int>() << " y=" << c.at("y").get<int>();
    } else if (type == "decision") {
        out << "  decision " << dose(ev.at("dose")) << " (" << ev.at("n").get<int>() << ',' << ev.at("y").get<int>()
            << ") -> " << ev.at("decision").get<std::string>();
    } else if (type == "rule") {
        out << "  " << ev.at("text").get<std::string>();
    } else if (type == "candidates") {
        out << "  candidates " << doses(ev.at("members")) << " selected " << doses(ev.at("selected"));
    } else if (type == "eliminated") {
        out << "  SR1 eliminated " << doses(ev.at("doses"));
    } else if (type == "stage") {
        out << "stage -> " << ev.at("to").get<std::string>();
        if (ev.contains("starting")) out << " starting " << doses(ev.at("starting"));
    } else if (type == "monitor") {
        out << "  monitor best " << dose(ev.at("best")) << " Pr(in EI)=" << ev.at("probability").get<double>()
            << (ev.at("triggered").get<bool>() ? " triggered" : "");
    } else if (type == "model") {
        out << "  model selects " << dose(ev.at("selected"));
    } else if (type == "stop") {
        out << "STOP: " << ev.at("reason").get<std::string>();
    } else if (type == "completed") {
        out << "completed with " << ev.at("enrolled").get<int>() << " patients";
    } else if (type == "result") {
        const auto& r = ev.at("result");
        out << "MTDC: " << (r.at("mtdc").is_null() ? std::string("none") : dose(r.at("mtdc")));
        if (!r.at("mtdc_set").empty()) out << " set " << doses(r.at("mtdc_set"));
    } else {
        out << ev.dump();
    }
    return out.str();
}

TrialConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    return parse_config_text(read_file(path));
}

int cmd_simulate(const std::string& scenario_name, const std::string& variant, int reps, std::uint64_t seed,
                 const std::string& out_dir, const std::string& config_path, int workers) {
    const Scenario sc = load_scenario(scenario_name);
    TrialConfig cfg = load_config(config_path);
    cfg.grid = sc.grid;
    cfg.target = sc.target;
    cfg.eps_low = sc.target - sc.lower;
    cfg.eps_high = sc.upper - sc.target;
    if (!variant.empty()) cfg.variant = variant == "three-stage" ? Variant::ThreeStage : Variant::TwoStage;
    cfg.validate();

    const auto oc = run_replications(sc, cfg, reps, seed, workers);
    const auto table = oc_csv(oc, sc.name, to_string(cfg.variant), seed);
    std::cout << table;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream(fs::path(out_dir) / "oc.csv", std::ios::binary) << table;
        std::ofstream(fs::path(out_dir) / "dc.csv", std::ios::binary) << dc_csv(oc, sc);
    }
    std::fprintf(stderr,
                 "%s %s, %d trials: PCS %.1f%%  POS %.1f%%  PUS %.1f%%  none %.1f%%  | PCA %.1f%%  POA %.1f%%  "
                 "PUA %.1f%%  | early stop %.1f%%  mean n %.1f (Stage I %.1f)\n",
                 sc.name.c_str(), to_string(cfg.variant).c_str(), oc.reps, 100 * oc.pcs, 100 * oc.pos,
                 100 * oc.pus, 100 * oc.none, 100 * oc.pca, 100 * oc.poa, 100 * oc.pua,
                 100 * oc.early_stop_rate, oc.mean_n, oc.mean_stage1_n);
    return 0;
}

int cmd_replay(const std::string& path, bool quiet) {
    const auto recorded = read_events(path);
    if (recorded.empty()) {
        std::cerr << "replay: " << path << " holds no events\n";
        return kUsage;
    }
    const auto report = replay(recorded);
    if (!quiet) {
        for (const auto& ev : report.trial.events()) std::cout << describe(ev) << '\n';
    }
    if (report.mismatch) {
        const auto& m = *report.mismatch;
        std::cerr << "replay diverges at event " << m.index << "\n  recorded: " << m.recorded.dump()
                  << "\n  replayed: " << m.replayed.dump() << '\n';
        return 1;
    }
    std::cerr << "replay: " << recorded.size() << " events reproduced exactly\n";
    return 0;
}

int cmd_decide(const std::string& path) {
    const auto recorded = read_events(path);
    if (recorded.empty()) {
        std::cerr << "decide: " << path << " holds no events\n";
        return kUsage;
    }
    const Trial trial = Trial::from_events(recorded);
    std::cout << trial.decision_report().dump(2) << '\n';
    return 0;
}

// Outcome script: one JSON array of {"dose": [i,j], "n": .., "y": ..} per
// line, one line per assignment.
int cmd_record(const std::string& config_path, const std::string& outcomes_path, const std::string& log_path) {
    Trial trial(load_config(config_path));
    std::istringstream in(read_file(outcomes_path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        if (trial.terminal()) throw std::runtime_error("outcomes line " + std::to_string(line_no) + ": trial already ended");
        std::vector<CohortOutcome> outs;
        for (const auto& c : json::parse(line)) {
            outs.push_back({dose_from_json(c.at("dose")), c.at("n").get<int>(), c.at("y").get<int>()});
        }
        trial.observe(outs);
    }
    write_events(log_path, trial.events());
    std::cerr << "record: " << trial.events().size() << " events, stage " << to_string(trial.stage()) << '\n';
    return 0;
}

ConductService* g_service = nullptr;

extern "C" void on_signal(int) {
    if (g_service) g_service->stop();
}

int cmd_serve(const std::string& host, int port, const std::string& data_dir) {
    ConductService service(data_dir);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const int bound = service.bind(host, port);
    std::cerr << "serving " << service.ids().size() << " trial(s) from " << data_dir << " on " << host << ':' << bound
              << '\n';
    service.listen();
    g_service = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-agent dose-finding: simulation, replay and live trial conduct"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Operating characteristics over replicated trials");
    std::string scenario, variant, out_dir, config_path;
    int reps = 1000, workers = 0;
    std::uint64_t seed = 0;
    sim->add_option("--scenario", scenario, "Fixture name (sc1..sc7) or scenario file")->required();
    sim->add_option("--variant", variant, "two-stage or three-stage (default: from config)")
        ->check(CLI::IsMember({"two-stage", "three-stage"}));
    sim->add_option("--reps", reps, "Number of simulated trials")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "Base seed")->envname("MCI_SEED");
    sim->add_option("--out", out_dir, "Directory for oc.csv and dc.csv");
    sim->add_option("--config", config_path, "Trial config (JSON)")->check(CLI::ExistingFile);
    sim->add_option("--workers", workers, "Worker threads (0: all cores)")->envname("MCI_WORKERS");

    auto* rep = app.add_subcommand("replay", "Re-run an event log and diff it against the recording");
    std::string log_path;
    bool quiet = false;
    rep->add_option("--log", log_path, "Event log")->required()->check(CLI::ExistingFile);
    rep->add_flag("--quiet", quiet, "Only report the verdict");

    auto* dec = app.add_subcommand("decide", "Recommendation for a trial state (event log)");
    std::string state_path;
    dec->add_option("--state", state_path, "Event log of the trial")->required()->check(CLI::ExistingFile);

    auto* rec = app.add_subcommand("record", "Build an event log from a config and an outcome script");
    std::string outcomes_path, record_out;
    rec->add_option("--config", config_path, "Trial config (JSON)")->required()->check(CLI::ExistingFile);
    rec->add_option("--outcomes", outcomes_path, "One JSON array of cohort outcomes per line")
        ->required()
        ->check(CLI::ExistingFile);
    rec->add_option("--log", record_out, "Output event log")->required();

    auto* srv = app.add_subcommand("serve", "Run the HTTP conduct service");
    std::string host = "127.0.0.1", data_dir = "trials";
    int port = 8080;
    srv->add_option("--host", host, "Bind address");
    srv->add_option("--port", port, "TCP port (0: any free port)")->check(CLI::Range(0, 65535));
    srv->add_option("--data-dir", data_dir, "Directory holding one event log per trial");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return cmd_simulate(scenario, variant, reps, seed, out_dir, config_path, workers);
        if (*rep) return cmd_replay(log_path, quiet);
        if (*dec) return cmd_decide(state_path);
        if (*rec) return cmd_record(config_path, outcomes_path, record_out);
        if (*srv) return cmd_serve(host, port, data_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
