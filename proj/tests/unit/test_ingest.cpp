#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mci33/ingest.hpp"

using namespace mci33;

TEST_CASE("fixture scenarios load with their true toxicities") {
    const auto sc2 = load_scenario("sc2");
    CHECK(sc2.grid == DoseGrid(4, 5));
    CHECK(sc2.truth({1, 3}) == doctest::Approx(0.28));
    CHECK(sc2.ei().contains(sc2.truth({1, 3})));
    CHECK(sc2.has_margins);
    const auto sc7 = load_scenario("sc7");
    CHECK(sc7.truth({4, 3}) == doctest::Approx(0.29));
    CHECK(sc7.true_mtdcs().contains({4, 3}));
    CHECK_FALSE(sc7.true_mtdcs().contains({4, 4}));
    CHECK(std::isnan(sc7.truth({0, 0})));
}

TEST_CASE("every fixture round-trips through the text form") {
    for (int k = 1; k <= 7; ++k) {
        const auto sc = load_scenario("sc" + std::to_string(k));
        CHECK(parse_scenario(render_scenario(sc)) == sc);
    }
}

TEST_CASE("scenario syntax errors") {
    const std::string head = "scenario x\np_T 0.3\nei 0.25 0.35\ndosage_a 1 2\ndosage_b 1 2\ntox\n";
    CHECK_NOTHROW(parse_scenario(head + "- 0.1 0.2\n0.1 0.2 0.3\n0.2 0.3 0.4\nend\n"));
    CHECK_NOTHROW(parse_scenario(head + "- - -\n- 0.2 0.3\n- 0.3 0.4\nend\n"));
    CHECK_THROWS_AS(parse_scenario(head + "- 0.1 0.2\n0.1 1.2 0.3\n0.2 0.3 0.4\nend\n"), parse_error);
    CHECK_THROWS_AS(parse_scenario(head + "- 0.1 0.2\n0.1 0.2\n0.2 0.3 0.4\nend\n"), parse_error);
    CHECK_THROWS_AS(parse_scenario(head + "0.1 0.1 0.2\n0.1 0.2 0.3\n0.2 0.3 0.4\nend\n"), parse_error);
    CHECK_THROWS_AS(parse_scenario(head + "- 0.1 -\n0.1 0.2 0.3\n0.2 0.3 0.4\nend\n"), parse_error);
    CHECK_THROWS_AS(parse_scenario(head + "- 0.1 0.2\n0.1 0.2 0.3\n0.2 0.3 0.4\n"), parse_error);
    CHECK_THROWS_AS(parse_scenario("bogus 1\n"), parse_error);
}

TEST_CASE("config defaults and overrides") {
    const auto def = parse_config(json::object());
    CHECK(def == TrialConfig{});
    const auto c = parse_config_text(R"({"p_T": 0.3, "eps1": 0.1, "eps2": 0, "levels_a": 3, "levels_b": 3,
                                         "variant": "three-stage", "seed": 12, "sampler": {"iterations": 1000, "burn_in": 500}})");
    CHECK(c.ei().lower() == doctest::Approx(0.2));
    CHECK(c.ei().upper() == doctest::Approx(0.3));
    CHECK(c.grid == DoseGrid(3, 3));
    CHECK(c.variant == Variant::ThreeStage);
    CHECK(c.seed == 12);
    CHECK(c.sampler.iterations == 1000);
    CHECK(parse_config(config_to_json(c)) == c);
}

TEST_CASE("config errors name the field") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"seed": -1})"), doctest::Contains("seed"), parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"colour": 1})"), doctest::Contains("colour"), parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"sampler": {"chains": 2}})"), doctest::Contains("sampler.chains"),
                         parse_error);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"cohort_size": "3"})"), doctest::Contains("cohort_size"), parse_error);
    CHECK_THROWS_AS(parse_config_text(R"({"eps1": 0.5})"), parse_error);
    CHECK_THROWS_AS(parse_config_text("[1, 2]"), parse_error);
    CHECK_THROWS_AS(parse_config_text("{"), parse_error);
    CHECK_THROWS_AS(parse_config_text(R"({"starting_dcs": [[1, 1]]})"), parse_error);
}
