#include "doctest.h"

#include <random>

#include "parasched/metrics.hpp"
#include "parasched/random_dag.hpp"
#include "test_util.hpp"

using namespace parasched;

TEST_CASE("tei follows the step-efficiency formula") {
    CHECK(tei({13, 13}, 50) == doctest::Approx(2.0));
    CHECK(tei({13, 0}, 50) == doctest::Approx(0.0));
    CHECK(tei({4, 4}, 100) == doctest::Approx(1.0));
}

TEST_CASE("tfr is the failed fraction") {
    CHECK(tfr({13, 6}) == doctest::Approx(7.0 / 13.0));
    CHECK(tfr({13, 6}) == doctest::Approx(0.538).epsilon(0.001));
    CHECK(tfr({5, 5}) == doctest::Approx(0.0));
    CHECK(tfr({5, 0}) == doctest::Approx(1.0));
}

TEST_CASE("tei and tfr satisfy the exact identity") {
    for (std::size_t total : {1u, 5u, 13u})
        for (std::size_t ok = 0; ok <= total; ++ok)
            for (long t : {10L, 50L})
                CHECK(tei({total, ok}, t) ==
                      doctest::Approx(100.0 / static_cast<double>(t) * (1.0 - tfr({total, ok}))));
}

TEST_CASE("ppr reports the merging reduction and the raw ratio") {
    CHECK(ppr(8, 10) == doctest::Approx(0.2));
    CHECK(ppr(7, 7) == doctest::Approx(0.0));
    CHECK(ppr(17, 19) == doctest::Approx(2.0 / 19.0));
    CHECK(ppr_ratio(8, 10) == doctest::Approx(0.8));
    CHECK(ppr_ratio(17, 19) == doctest::Approx(17.0 / 19.0));
}

TEST_CASE("apr measures both-arms-busy time over the makespan") {
    Plan plan;
    plan.left_trace = {{0, 20, 1, "a"}, {30, 50, 2, "b"}};
    plan.right_trace = {{10, 30, 3, "c"}};
    plan.makespan = 50;
    CHECK(both_busy_seconds(plan) == 10);
    CHECK(apr(plan) == doctest::Approx(0.2));

    // strictly alternating arms never overlap
    Plan alternating;
    alternating.left_trace = {{0, 5, 1, "a"}, {10, 15, 3, "c"}};
    alternating.right_trace = {{5, 10, 2, "b"}};
    alternating.makespan = 15;
    CHECK(apr(alternating) == doctest::Approx(0.0));
    CHECK(parallel_intervals(alternating).empty());
}

TEST_CASE("the kitchen plan overlaps the arms for 43 of 82 seconds") {
    auto plan = schedule(testutil::kitchen_dag());
    CHECK(both_busy_seconds(plan) == 43);
    CHECK(apr(plan) == doctest::Approx(43.0 / 82.0));
    auto intervals = parallel_intervals(plan);
    REQUIRE(intervals.size() == 7);
    CHECK(intervals[0] == std::pair<long, long>{0, 5});
    CHECK(intervals[1] == std::pair<long, long>{5, 12});
    CHECK(intervals[2] == std::pair<long, long>{17, 27});
    CHECK(intervals[3] == std::pair<long, long>{27, 37});
    CHECK(intervals[4] == std::pair<long, long>{37, 42});
    CHECK(intervals[5] == std::pair<long, long>{48, 51});
    CHECK(intervals[6] == std::pair<long, long>{66, 69});
}

TEST_CASE("apr is translation invariant and stays within the unit interval") {
    std::mt19937 rng(59);
    for (int i = 0; i < 500; ++i) {
        auto plan = schedule(random_valid_dag(rng, 14));
        double a = apr(plan);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);

        Plan shifted = plan;
        for (auto* tr : {&shifted.left_trace, &shifted.right_trace})
            for (auto& e : *tr) {
                e.start += 1000;
                e.end += 1000;
            }
        // makespan denominators must move together for invariance
        shifted.makespan = plan.makespan;
        CHECK(both_busy_seconds(shifted) == both_busy_seconds(plan));
    }
}

TEST_CASE("metric tables render every row in both formats") {
    std::vector<MetricRow> rows{{"kitchen/easy/3", {2.0, 0.0, 0.105, 0.524}},
                                {"greenhouse/easy/2", {1.9, 0.0, 0.0, 0.4}}};
    auto csv = metrics_table_csv(rows);
    CHECK(csv.find("label,tei,tfr,ppr,apr") != std::string::npos);
    CHECK(csv.find("kitchen/easy/3") != std::string::npos);
    CHECK(csv.find("greenhouse/easy/2") != std::string::npos);

    auto text = metrics_table_text(rows);
    CHECK(text.find("kitchen/easy/3") != std::string::npos);
    CHECK(text.find("TEI") != std::string::npos);
}
