#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mci33/model.hpp"

using namespace mci33;

namespace {

const DoseGrid kGrid(4, 5);
const EquivalenceInterval kEi(0.3, 0.05, 0.05);

double truth(const DoseCombo& dc) {
    const double x1 = dc.i, x2 = dc.j;
    const double eta = -4 + 0.5 * x1 + 0.5 * x2 + 0.1 * x1 * x2;
    return 1 / (1 + std::exp(-eta));
}

TrialData large_sample(int n) {
    TrialData d(4, 5);
    for (const auto& dc : kGrid.combinations()) d.add(dc, n, static_cast<int>(std::lround(n * truth(dc))));
    return d;
}

}  // namespace

TEST_CASE("plain model recovers a known surface") {
    const auto post = fit(ModelKind::Plain, large_sample(200), kGrid, PriorSpec{}, SamplerConfig{}, 17);
    CHECK(post.acceptance_rate() > 0.1);
    CHECK(post.draws().size() == 1000);
    for (const auto& dc : kGrid.combinations()) {
        CAPTURE(dc.i);
        CAPTURE(dc.j);
        CHECK(std::abs(post.mean_prob(dc) - truth(dc)) < 0.05);
    }
}

TEST_CASE("change-point model fits the tested rectangle") {
    TrialData d(4, 5);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 3; ++j) d.add({i, j}, 100, static_cast<int>(std::lround(100 * truth({i, j}))));
    const auto post = fit(ModelKind::ChangePoint, d, kGrid, PriorSpec{}, SamplerConfig{}, 3);
    CHECK(post.x1max() == 2.0);
    CHECK(post.x2max() == 3.0);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 3; ++j) CHECK(std::abs(post.mean_prob({i, j}) - truth({i, j})) < 0.05);
}

TEST_CASE("monitor: strong evidence triggers, a single cohort does not") {
    TrialData strong(4, 5);
    strong.add({2, 2}, 200, 60);
    strong.add({1, 1}, 200, 20);
    const auto post = fit(ModelKind::ChangePoint, strong, kGrid, PriorSpec{}, SamplerConfig{}, 9);
    const auto reading = monitor(post, kEi, 0.4);
    CHECK(reading.triggered);
    CHECK(reading.probability > 0.4);
    CHECK(monitor_trigger(post, kEi, 0.4));

    int triggered = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
        TrialData weak(4, 5);
        weak.add({1, 1}, 3, 0);
        weak.add({1, 2}, 3, 0);
        const auto p = fit(ModelKind::ChangePoint, weak, kGrid, PriorSpec{}, SamplerConfig{}, s);
        triggered += monitor_trigger(p, kEi, 0.4) ? 1 : 0;
    }
    CHECK(triggered <= 2);
}

TEST_CASE("stage three picks the admissible DC most likely inside the interval") {
    const auto post = fit(ModelKind::Plain, large_sample(200), kGrid, PriorSpec{}, SamplerConfig{}, 21);
    Rng rng(1);
    // True rates: (2,3) 0.289, (1,5) 0.378, (4,1) 0.25.
    const auto pick = stage3_select(post, {{1, 5}, {2, 3}, {4, 1}}, kEi, rng);
    CHECK(pick == DoseCombo{2, 3});
    CHECK_THROWS_AS(stage3_select(post, {}, kEi, rng), domain_error);
}

TEST_CASE("same seed, same draws") {
    TrialData d(4, 5);
    d.add({1, 1}, 3, 1);
    d.add({0, 2}, 3, 0);
    const auto a = fit(ModelKind::ChangePoint, d, kGrid, PriorSpec{}, SamplerConfig{}, 5);
    const auto b = fit(ModelKind::ChangePoint, d, kGrid, PriorSpec{}, SamplerConfig{}, 5);
    CHECK(a.draws() == b.draws());
}

TEST_CASE("sampler settings are validated") {
    TrialData d(4, 5);
    d.add({1, 1}, 3, 1);
    CHECK_THROWS_AS(fit(ModelKind::Plain, d, kGrid, PriorSpec{}, SamplerConfig{100, 200, 1}, 1), domain_error);
    CHECK_THROWS_AS(fit(ModelKind::Plain, d, kGrid, PriorSpec{}, SamplerConfig{100, 10, 0}, 1), domain_error);
}
