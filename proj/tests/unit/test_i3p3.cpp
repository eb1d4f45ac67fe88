#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "../oracles.hpp"
#include "mci33/i3p3.hpp"

using namespace mci33;

TEST_CASE("decisions match the tabulated rule for n up to 12") {
    const EquivalenceInterval ei(0.3, 0.05, 0.05);
    for (int n = 1; n <= 12; ++n)
        for (int y = 0; y <= n; ++y) {
            CAPTURE(n);
            CAPTURE(y);
            CHECK(to_char(decide(n, y, ei)) == oracle::table_decision(n, y, 1, 4, 7, 20));
        }
}

TEST_CASE("hand-checked decisions") {
    const EquivalenceInterval ei(0.3, 0.05, 0.05);
    CHECK(decide(3, 0, ei) == Decision::Escalate);
    CHECK(decide(3, 1, ei) == Decision::Stay);  // 1/3 inside
    CHECK(decide(3, 2, ei) == Decision::DeEscalate);
    CHECK(decide(4, 1, ei) == Decision::Stay);   // 1/4 on the lower bound
    CHECK(decide(6, 3, ei) == Decision::DeEscalate);
    CHECK(decide(2, 1, ei) == Decision::Stay);   // 0/2 below after removing one
    CHECK(decide(20, 7, ei) == Decision::Stay);  // 7/20 on the upper bound
}

TEST_CASE("decisions run E, then S, then D as DLTs increase") {
    for (const auto& ei : {EquivalenceInterval(0.3, 0.05, 0.05), EquivalenceInterval(0.2, 0.05, 0.05),
                           EquivalenceInterval(0.3, 0.1, 0.0)}) {
        for (int n = 1; n <= 12; ++n) {
            int prev = 0;
            for (int y = 0; y <= n; ++y) {
                const int rank = static_cast<int>(decide(n, y, ei));
                CHECK(rank >= prev);
                prev = rank;
            }
            CHECK(decide(n, n, ei) != Decision::Escalate);
        }
    }
}

TEST_CASE("invalid counts") {
    const EquivalenceInterval ei(0.3, 0.05, 0.05);
    CHECK_THROWS_AS(decide(0, 0, ei), domain_error);
    CHECK_THROWS_AS(decide(3, 4, ei), domain_error);
    CHECK_THROWS_AS(decide(3, -1, ei), domain_error);
}
