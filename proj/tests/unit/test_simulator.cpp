#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mci33/ingest.hpp"
#include "mci33/simulator.hpp"

using namespace mci33;

namespace {

Scenario uniform(double p) {
    std::string doc = "scenario flat\np_T 0.3\nei 0.25 0.35\ndosage_a 1 2 3\ndosage_b 1 2 3\ntox\n";
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 3; ++j) doc += (i == 0 && j == 0) ? "- " : std::to_string(p) + " ";
        doc += "\n";
    }
    return parse_scenario(doc + "end\n");
}

TrialConfig config_for(const Scenario& sc) {
    TrialConfig c;
    c.grid = sc.grid;
    c.max_total_n = 36;
    return c;
}

}  // namespace

TEST_CASE("operating characteristics of three hand-built results") {
    const auto sc = load_scenario("sc3");
    std::vector<TrialResult> rs(3);
    for (auto& r : rs) r.data = TrialData(4, 5);
    rs[0].mtdc = DoseCombo{2, 2};
    rs[0].data.add({2, 2}, 6, 1);
    rs[0].data.add({1, 0}, 3, 0);
    rs[1].mtdc = DoseCombo{4, 5};
    rs[1].data.add({4, 5}, 3, 1);
    rs[2].stopped_early = true;
    rs[2].data.add({1, 1}, 3, 3);
    const auto oc = compute_ocs(rs, sc);
    const auto cls = [&](DoseCombo dc) {
        const double p = sc.truth(dc);
        return p < sc.lower ? 'U' : p > sc.upper ? 'O' : 'C';
    };
    const double third = 1.0 / 3.0;
    CHECK(oc.reps == 3);
    CHECK(oc.none == doctest::Approx(third));
    CHECK(oc.early_stop_rate == doctest::Approx(third));
    CHECK(oc.pcs + oc.pos + oc.pus + oc.none == doctest::Approx(1.0));
    CHECK(oc.pos == doctest::Approx((cls({2, 2}) == 'O') * third + (cls({4, 5}) == 'O') * third));
    CHECK(oc.mean_n == doctest::Approx(15.0 / 3));
    CHECK(oc.mean_stage1_n == doctest::Approx(1.0));
    CHECK(oc.selection.at({2, 2}) == doctest::Approx(third));
    CHECK(oc.allocation(1, 1) == doctest::Approx(1.0));
    double alloc = 0;
    for (auto dc : {DoseCombo{2, 2}, DoseCombo{4, 5}, DoseCombo{1, 1}})
        alloc += (cls(dc) == 'C') * (dc == DoseCombo{2, 2} ? 6 : 3);
    CHECK(oc.pca == doctest::Approx(alloc / 12));
}

TEST_CASE("uniformly toxic doses stop almost every trial") {
    const auto sc = uniform(0.9);
    const auto oc = run_replications(sc, config_for(sc), 100, 1, 1);
    CHECK(oc.early_stop_rate >= 0.95);
    CHECK(oc.none >= 0.95);
}

TEST_CASE("replications are reproducible and independent of worker count") {
    const auto sc = load_scenario("sc1");
    TrialConfig c = config_for(sc);
    c.grid = sc.grid;
    const auto a = run_replications(sc, c, 30, 5, 1);
    const auto b = run_replications(sc, c, 30, 5, 3);
    CHECK(oc_csv(a, "sc1", "two-stage", 5) == oc_csv(b, "sc1", "two-stage", 5));
    CHECK(dc_csv(a, sc) == dc_csv(b, sc));
    const auto r1 = simulate_trial(sc, c, 42);
    const auto r2 = simulate_trial(sc, c, 42);
    CHECK(r1.data == r2.data);
    CHECK(r1.mtdc == r2.mtdc);
}

TEST_CASE("CSV layout") {
    const auto sc = uniform(0.1);
    const auto oc = run_replications(sc, config_for(sc), 4, 0, 1);
    const auto csv = oc_csv(oc, "flat", "two-stage", 0);
    CHECK(csv.rfind("scenario,variant,reps,seed,pcs,pos,pus,none,early_stop_rate,pca,poa,pua,mean_n,mean_stage1_n\n", 0) == 0);
    CHECK(dc_csv(oc, sc).rfind("i,j,true_tox,in_ei,selection,mean_patients\n", 0) == 0);
}

TEST_CASE("mismatched grids are rejected") {
    const auto sc = load_scenario("sc1");
    TrialConfig c;
    c.grid = DoseGrid(3, 3);
    CHECK_THROWS_AS(simulate_trial(sc, c, 1), domain_error);
}
