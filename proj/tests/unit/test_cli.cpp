#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "../proc.hpp"
#include "mci33/eventlog.hpp"
#include "mci33/ingest.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = quote(MCI33_CLI);
const fs::path kFixtures = MCI33_FIXTURES;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "mci33_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("simulate rejects a non-positive replication count") {
    CHECK(run_command(kCli + " simulate --scenario sc1 --reps 0 2>/dev/null").exit_code != 0);
    CHECK(run_command(kCli + " simulate --scenario nosuch --reps 1 2>/dev/null").exit_code == 1);
}

TEST_CASE("simulate writes the OC table to stdout and files") {
    const auto out = scratch("sim");
    const auto r = run_command(kCli + " simulate --scenario sc2 --reps 5 --seed 3 --workers 2 --out " +
                               quote(out.string()) + " 2>/dev/null");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("scenario,variant,reps,seed,", 0) == 0);
    CHECK(fs::exists(out / "oc.csv"));
    CHECK(fs::exists(out / "dc.csv"));
}

TEST_CASE("replay: empty log, clean log, tampered log") {
    const auto empty = scratch("empty.log");
    std::ofstream(empty).close();
    CHECK(run_command(kCli + " replay --log " + quote(empty.string()) + " 2>/dev/null").exit_code == 2);

    const auto good = kFixtures / "figure3.log";
    CHECK(run_command(kCli + " replay --quiet --log " + quote(good.string()) + " 2>/dev/null").exit_code == 0);

    auto events = mci33::read_events(good);
    for (auto& e : events)
        if (e.at("type") == "candidates" && e.at("selected").size() == 1) {
            e["selected"][0] = mci33::json::array({4, 5});
            break;
        }
    const auto bad = scratch("tampered.log");
    mci33::write_events(bad, events);
    const auto r = run_command(kCli + " replay --quiet --log " + quote(bad.string()) + " 2>&1");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("diverges") != std::string::npos);
}

TEST_CASE("decide prints the recommendation for a recorded state") {
    const auto r = run_command(kCli + " decide --state " + quote((kFixtures / "figure3.log").string()));
    REQUIRE(r.exit_code == 0);
    const auto doc = mci33::json::parse(r.out);
    CHECK(doc.at("stage") == "completed");
}

TEST_CASE("record rebuilds the fixture log byte for byte") {
    const auto out = scratch("figure3.log");
    const auto r = run_command(kCli + " record --config " + quote((kFixtures / "figure3.config.json").string()) +
                               " --outcomes " + quote((kFixtures / "figure3.outcomes").string()) + " --log " +
                               quote(out.string()) + " 2>/dev/null");
    REQUIRE(r.exit_code == 0);
    CHECK(mci33::read_file(out) == mci33::read_file(kFixtures / "figure3.log"));
}

TEST_CASE("usage errors") {
    CHECK(run_command(kCli + " 2>/dev/null").exit_code != 0);
    CHECK(run_command(kCli + " bogus 2>/dev/null").exit_code != 0);
    CHECK(run_command(kCli + " decide --state /nonexistent 2>/dev/null").exit_code != 0);
}
