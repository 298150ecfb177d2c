#include "mmcsetup/serialize.hpp"
#include "mmcsetup/sweep.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mmcsetup;

TEST(Csv, QuotesOnlyWhenNeeded) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
    EXPECT_EQ(csv_row({"x", "y,z", ""}), "x,\"y,z\",");
}

TEST(Csv, NumbersRoundTrip) {
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(csv_number(v)), v);
}

TEST(Json, ReportFields) {
    const ValidatedParams p = validate({1.0, 1.0, 1.0, 2});
    const PerformanceReport r = evaluate(stationary(p).distribution(), p, CostParams{});
    const Json j = to_json(r);
    EXPECT_DOUBLE_EQ(j["e_jobs"].get<double>(), r.e_jobs);
    EXPECT_EQ(j["marginal"].size(), 3u);
    EXPECT_EQ(j.begin().key(), "e_active");
}

TEST(Json, ErrorCarriesCode) {
    try {
        validate({5.0, 1.0, 1.0, 2});
    } catch (const Error& e) {
        const Json j = error_json(e);
        EXPECT_EQ(j["error"], "Unstable");
        EXPECT_DOUBLE_EQ(j["rho"].get<double>(), 2.5);
    }
}

TEST(Json, SolutionsSerialize) {
    const ValidatedParams p = validate({1.0, 1.0, 1.0, 2});
    const Json g = to_json(solve_gf(p));
    EXPECT_EQ(g["method"], "gf");
    EXPECT_FALSE(g["z"].empty());
    const Json q = to_json(stationary(p));
    EXPECT_EQ(q["R"].size(), 3u);
}

TEST(SweepSpec, Validation) {
    SweepSpec s;
    s.grid = {0.1, 0.1};
    EXPECT_THROW(s.check(), Error);
    s.grid = {};
    EXPECT_THROW(s.check(), Error);
    s.variable = SweepVariable::Rho;
    s.grid = {0.5, 1.2};
    EXPECT_THROW(s.check(), UnstableError);
    s.variable = SweepVariable::Servers;
    s.grid = {2.5};
    EXPECT_THROW(s.check(), Error);
}

TEST(Sweep, DeterministicCsv) {
    SweepSpec s;
    s.grid = {0.05, 0.5, 5.0};
    s.c = 5;
    s.methods = {Method::Qbd, Method::Sim};
    s.sim_events = 20'000;
    std::ostringstream a, b;
    write_sweep_csv(a, s, run_sweep(s));
    s.threads = 1;
    write_sweep_csv(b, s, run_sweep(s));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().rfind("# ", 0), 0u);
}

TEST(Sweep, AllMethodsAgree) {
    SweepSpec s;
    s.grid = {0.01, 1.0, 10.0};
    s.c = 10;
    s.rho = 0.9;
    s.methods = parse_methods("all");
    for (const SweepRow& r : run_sweep(s)) {
        ASSERT_TRUE(r.max_discrepancy.has_value());
        EXPECT_LT(*r.max_discrepancy, 1e-9);
        EXPECT_TRUE(r.error.empty()) << r.error;
    }
}

TEST(Sweep, PointFailuresLandInErrorColumn) {
    SweepSpec s;
    s.grid = {1.0};
    s.c = 400;
    s.methods = {Method::Gf};
    const auto rows = run_sweep(s);
    ASSERT_EQ(rows.size(), 1u);
    if (!rows[0].report) {
        EXPECT_NE(rows[0].error.find("gf: "), std::string::npos);
    }
}

TEST(Sweep, CostFallsWithAlphaAndCrossesOnce) {
    for (double rho : {0.3, 0.5, 0.7}) {
        SweepSpec s;
        s.c = 20;
        s.rho = rho;
        for (int k = 0; k <= 30; ++k)
            s.grid.push_back(1e-3 * std::pow(1e5, k / 30.0));
        const auto rows = run_sweep(s);
        int crossings = 0;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            EXPECT_LE(rows[k].report->cost_onoff, rows[k - 1].report->cost_onoff + 1e-12);
            const bool before = rows[k - 1].report->cost_onoff > rows[k - 1].report->cost_onidle;
            const bool after = rows[k].report->cost_onoff > rows[k].report->cost_onidle;
            crossings += before != after;
        }
        EXPECT_EQ(crossings, 1) << rho;
    }
}

TEST(Crossover, GrowsWithLoadAndCertifiesRoot) {
    const CostParams k;
    const Crossover low = crossover_finder(QueueParams::from_rho(0.3, 1.0, 1.0, 20), k);
    const Crossover high = crossover_finder(QueueParams::from_rho(0.7, 1.0, 1.0, 20), k);
    EXPECT_GT(high.alpha, low.alpha);
    const double onidle = 20 * 0.7 + 20 * 0.3 * 0.6;
    EXPECT_LT(std::abs(high.gap), 1e-5 * onidle);
}

TEST(Crossover, NoCrossingWhenIdleServersAreFree) {
    CostParams k;
    k.c_idle = 0.0;
    try {
        crossover_finder(QueueParams::from_rho(0.5, 1.0, 1.0, 20), k);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoCrossing);
    }
}

TEST(Crossover, TotalCostHasTwoCrossingsAtModerateLoad) {
    const auto found = find_crossings(QueueParams::from_rho(0.5, 1.0, 1.0, 20), CostParams{}, 1e-4, 1e3,
                                      CostCurve::Total);
    ASSERT_EQ(found.size(), 2u);
    EXPECT_LT(found[0].alpha, found[1].alpha);
}
