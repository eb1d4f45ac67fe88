#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mci33/core.hpp"

using namespace mci33;

TEST_CASE("partial order: higher and lower are mirror images") {
    const DoseGrid grid(4, 5);
    const auto lattice = grid.lattice();
    for (const auto& a : lattice) {
        for (const auto& b : lattice) {
            CHECK(is_higher(a, b) == is_lower(b, a));
            CHECK_FALSE((is_higher(a, b) && is_lower(a, b)));
        }
        CHECK_FALSE(is_higher(a, a));
    }
}

TEST_CASE("partial order: diagonal neighbours are incomparable") {
    CHECK_FALSE(is_higher({2, 1}, {1, 2}));
    CHECK_FALSE(is_lower({2, 1}, {1, 2}));
    CHECK(is_higher({2, 2}, {1, 1}));
    CHECK(is_higher({2, 1}, {1, 1}));
    CHECK(is_higher({1, 3}, {1, 2}));
    CHECK(is_higher({1, 1}, {0, 1}));
    CHECK(is_lower({1, 0}, {3, 0}));
}

TEST_CASE("grid membership and enumeration") {
    const DoseGrid grid(4, 5);
    CHECK(grid.combinations().size() == 20);
    CHECK(grid.lattice().size() == 29);
    CHECK_FALSE(grid.contains({0, 0}));
    CHECK(grid.contains({0, 5}));
    CHECK_FALSE(grid.contains({5, 1}));
    CHECK_FALSE(grid.contains_combination({3, 0}));
    CHECK(grid.combinations().front() == DoseCombo{1, 1});
    CHECK(grid.combinations()[1] == DoseCombo{1, 2});
    CHECK(grid.dose_sum({2, 3}) == 5.0);

    const DoseGrid real({0.5, 1.0}, {10.0, 20.0, 40.0});
    CHECK(real.dosage_a(0) == 0.0);
    CHECK(real.dose_sum({2, 3}) == 41.0);
    CHECK_THROWS_AS(DoseGrid(0, 3), domain_error);
    CHECK_THROWS_AS(DoseGrid({1.0, 1.0}, {1.0}), domain_error);
}

TEST_CASE("trial data accumulates and enforces counts") {
    TrialData d(2, 3);
    d.add({1, 1}, 3, 1);
    d.add({1, 1}, 3, 0);
    CHECK(d.n({1, 1}) == 6);
    CHECK(d.y({1, 1}) == 1);
    d.add({0, 2}, 3, 3);
    CHECK(d.total_n() == 9);
    CHECK(d.tried_doses().size() == 2);
    CHECK_THROWS_AS(d.add({1, 2}, 2, 3), domain_error);
    CHECK_THROWS_AS(d.add({1, 2}, -1, 0), domain_error);
    CHECK_THROWS(d.add({3, 1}, 3, 0));
    CHECK_THROWS(d.n({0, 0}));
}

TEST_CASE("equivalence interval is closed") {
    const EquivalenceInterval ei(0.3, 0.05, 0.05);
    CHECK(ei.lower() == doctest::Approx(0.25));
    CHECK(ei.upper() == doctest::Approx(0.35));
    CHECK(ei.contains(0.25));
    CHECK(ei.contains(0.35));
    CHECK_FALSE(ei.contains(0.2499));
    CHECK_THROWS_AS(EquivalenceInterval(0.3, 0.4, 0.05), domain_error);
    CHECK_THROWS_AS(EquivalenceInterval(0.3, -0.1, 0.05), domain_error);
}

TEST_CASE("ratio comparison is exact at decimal bounds") {
    CHECK(compare_ratio(1, 4, 0.25) == 0);
    CHECK(compare_ratio(1, 3, 0.35) < 0);
    CHECK(compare_ratio(7, 20, 0.35) == 0);
    CHECK(compare_ratio(2, 3, 0.35) > 0);
    CHECK(compare_ratio(0, 5, 0.25) < 0);
    CHECK(compare_ratio(3, 12, 0.25) == 0);
}

TEST_CASE("decision characters round-trip") {
    for (auto d : {Decision::Escalate, Decision::Stay, Decision::DeEscalate}) CHECK(decision_from_char(to_char(d)) == d);
    CHECK(to_char(Decision::Escalate) == 'E');
}
