#include <cmath>

#include <gtest/gtest.h>

#include "bhk/bounds.hpp"

using namespace bhk;

TEST(BoundSuite, UnknownSuiteRejected) {
    EXPECT_THROW(run_bound_suite(1, 10, {"nope"}), UsageError);
    EXPECT_THROW(run_bound_suite(1, 0, {"parallel"}), UsageError);
}

TEST(BoundSuite, GeometrySuitesPass) {
    for (const auto& r : run_bound_suite(7, 10000, {"parallel", "x0y0", "rho"})) {
        EXPECT_TRUE(r.pass) << r.name << ": " << r.note;
        EXPECT_EQ(r.n_violations, 0u) << r.name;
        EXPECT_LE(r.fitted, r.ceiling) << r.name;
    }
}

TEST(BoundSuite, ParallelFactorAttainsTwo) {
    const BoundResult r = run_bound_suite(7, 10000, {"parallel"}).front();
    EXPECT_LE(r.fitted, 2.0);
    EXPECT_GT(r.fitted, 1.9);
}

TEST(BoundSuite, DeterministicGivenSeed) {
    const std::vector<std::string> suites = {"parallel", "x0y0", "rho", "ms", "lemma41"};
    const auto a = run_bound_suite(11, 60, suites), b = run_bound_suite(11, 60, suites);
    EXPECT_EQ(emit_report(bound_report(a, 11, 60), "json"), emit_report(bound_report(b, 11, 60), "json"));
    const auto c = run_bound_suite(12, 60, {"x0y0"});
    EXPECT_NE(c.front().fitted, a[1].fitted);
}

TEST(BoundSuite, FittedConstantsNonDecreasingInCaseCount) {
    const std::vector<std::string> suites = {"parallel", "x0y0", "rho", "ms", "lemma31", "lemma41"};
    const auto small = run_bound_suite(5, 40, suites), large = run_bound_suite(5, 80, suites);
    for (std::size_t i = 0; i < suites.size(); ++i) {
        EXPECT_GE(large[i].fitted, small[i].fitted) << suites[i];
        EXPECT_GE(large[i].n_cases, small[i].n_cases) << suites[i];
    }
}

TEST(BoundSuite, OneMinusExpConstantStable) {
    const BoundResult r = run_bound_suite(1, 1, {"oneminusexp"}).front();
    EXPECT_TRUE(r.pass) << r.note;
    EXPECT_TRUE(std::isfinite(r.fitted));
    for (double c1 : {0.1, 1.0, 10.0}) EXPECT_NEAR(one_minus_exp_c0(c1, 200) / one_minus_exp_c0(c1, 100), 1.0, 0.05);
}

TEST(BoundSuite, ReportShape) {
    const auto res = run_bound_suite(3, 100, {"parallel", "rho"});
    const Report rep = bound_report(res, 3, 100);
    EXPECT_EQ(rep.kind, "bound_suite");
    EXPECT_EQ(rep.rows.size(), 2u);
    const CsvTable t = load_csv(emit_report(rep, "csv"));
    EXPECT_EQ(t.rows[0][t.column("suite")], "parallel");
    EXPECT_EQ(t.number(1, "fitted"), res[1].fitted);
}

TEST(PlacePair, RealizesRequestedGeometry) {
    const auto [x, y] = detail::place_pair(3, 0.2, 0.05, 0.3, 0.4);
    EXPECT_NEAR(delta_ball(x), 0.2, 1e-14);
    EXPECT_NEAR(delta_ball(y), 0.05, 1e-14);
    EXPECT_NEAR(distance(x, y), 0.3, 1e-14);
}
