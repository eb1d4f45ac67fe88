#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mci33/stage1.hpp"

using namespace mci33;

namespace {
const EquivalenceInterval kEi(0.3, 0.05, 0.05);
}

TEST_CASE("a track escalates until the first non-escalation") {
    auto t = AgentTrack::start(Agent::A, 4);
    CHECK(t.current_dose() == DoseCombo{1, 0});
    t = stage1_step(t, {{1, 0}, 3, 0}, kEi);
    CHECK(t.current_level == 2);
    CHECK_FALSE(t.finished());
    t = stage1_step(t, {{2, 0}, 3, 1}, kEi);
    REQUIRE(t.finished());
    CHECK(*t.first_non_escalation == 2);
    CHECK(t.cleared_level() == 1);
    CHECK_THROWS_AS(stage1_step(t, {{2, 0}, 6, 1}, kEi), state_error);
}

TEST_CASE("drug B track walks the column") {
    auto t = AgentTrack::start(Agent::B, 3);
    CHECK(t.current_dose() == DoseCombo{0, 1});
    CHECK_THROWS_AS(stage1_step(t, {{1, 0}, 3, 0}, kEi), state_error);
    for (int j = 1; j <= 3; ++j) t = stage1_step(t, {{0, j}, 3, 0}, kEi);
    REQUIRE(t.finished());
    CHECK(*t.first_non_escalation == 4);
    CHECK(t.cleared_level() == 3);
}

TEST_CASE("a first-dose de-escalation clears nothing") {
    auto t = stage1_step(AgentTrack::start(Agent::A, 4), {{1, 0}, 3, 3}, kEi);
    CHECK(t.finished());
    CHECK(t.cleared_level() == 0);
}

TEST_CASE("starting combinations") {
    CHECK(starting_dcs(3, 4) == DoseSet{{3, 1}, {1, 4}});
    CHECK(starting_dcs(1, 1) == DoseSet{{1, 1}});
    CHECK(starting_dcs(0, 4) == DoseSet{{1, 1}});
    CHECK(starting_dcs(2, 0) == DoseSet{{1, 1}});
}
