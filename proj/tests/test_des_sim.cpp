#include "mmcsetup/des_sim.hpp"
#include "mmcsetup/qbd_solver.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mmcsetup;

namespace {

PerformanceReport analytic(const QueueParams& q) {
    const ValidatedParams p = validate(q);
    return evaluate(stationary(p).distribution(), p, CostParams{});
}

}  // namespace

TEST(SimConfig, Rejects) {
    SimConfig cfg;
    cfg.params = {1.0, 1.0, 1.0, 2};
    cfg.batches = 5;
    EXPECT_THROW(cfg.check(), Error);
    cfg.batches = 20;
    cfg.warmup_fraction = 1.0;
    EXPECT_THROW(cfg.check(), Error);
    cfg.warmup_fraction = 0.1;
    cfg.events = 10;
    try {
        cfg.check();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    }
}

TEST(Simulate, SameSeedSameEstimate) {
    SimConfig cfg;
    cfg.params = {1.0, 1.0, 1.0, 2};
    cfg.events = 100'000;
    cfg.seed = 42;
    const SimEstimate a = simulate(cfg);
    const SimEstimate b = simulate(cfg);
    EXPECT_EQ(a.e_jobs.mean, b.e_jobs.mean);
    EXPECT_EQ(a.e_jobs.half_width, b.e_jobs.half_width);
    EXPECT_EQ(a.switching_rate.mean, b.switching_rate.mean);
    cfg.seed = 43;
    EXPECT_NE(simulate(cfg).e_jobs.mean, a.e_jobs.mean);
}

TEST(Simulate, MatchesAnalyticMeanJobs) {
    SimConfig cfg;
    cfg.params = {1.0, 1.0, 1.0, 2};
    const SimEstimate s = simulate(cfg);
    const PerformanceReport r = analytic(cfg.params);
    EXPECT_GT(s.e_jobs.half_width, 0.0);
    EXPECT_LE(std::abs(s.e_jobs.mean - r.e_jobs), 3.0 * s.e_jobs.half_width);
    EXPECT_TRUE(validate_against(r, s).all_pass());
}

TEST(Simulate, SetupCountIsStateDetermined) {
    SimConfig cfg;
    cfg.params = {2.1, 1.0, 0.4, 3};
    cfg.events = 50'000;
    std::stringstream trace;
    simulate(cfg, &trace);
    std::string line;
    std::getline(trace, line);
    EXPECT_EQ(line, "event,time,kind,active,setup,jobs");
    int rows = 0;
    while (std::getline(trace, line)) {
        std::stringstream ls(line);
        std::string f[6];
        for (auto& x : f)
            std::getline(ls, x, ',');
        const int i = std::stoi(f[3]), s = std::stoi(f[4]), j = std::stoi(f[5]);
        ASSERT_EQ(s, std::min(j - i, 3 - i)) << line;
        ASSERT_LE(i + s, 3);
        ++rows;
    }
    EXPECT_EQ(rows, 50'000);
}

TEST(Simulate, SwitchesBalance) {
    SimConfig cfg;
    cfg.params = {3.0, 1.0, 0.5, 5};
    const SimEstimate s = simulate(cfg);
    const double hw = std::hypot(s.switching_rate.half_width, s.setup_completions.half_width);
    EXPECT_LE(std::abs(s.switching_rate.mean - s.setup_completions.mean), 3.0 * hw);
}

TEST(ValidateAgainst, FlagsPerturbedArrivalRate) {
    SimConfig cfg;
    cfg.params = {1.05, 1.0, 1.0, 2};
    const SimEstimate s = simulate(cfg);
    const ValidationReport v = validate_against(analytic({1.0, 1.0, 1.0, 2}), s);
    EXPECT_FALSE(v.all_pass());
    const auto it = std::find_if(v.checks.begin(), v.checks.end(), [](const MetricCheck& m) { return m.name == "e_jobs"; });
    ASSERT_NE(it, v.checks.end());
    EXPECT_FALSE(it->pass);
}

TEST(ValidateAgainst, NoWarmupStillConsistent) {
    SimConfig cfg;
    cfg.params = {1.0, 1.0, 1.0, 2};
    cfg.events = 200'000;
    cfg.warmup_fraction = 0.0;
    cfg.seed = 7;
    EXPECT_TRUE(validate_against(analytic(cfg.params), simulate(cfg)).all_pass());
}
