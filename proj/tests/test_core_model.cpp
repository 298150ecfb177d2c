#include "mmcsetup/core_model.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace mmcsetup;

TEST(Validate, AcceptsStableParameters) {
    const ValidatedParams p = validate({1.0, 1.0, 1.0, 2});
    EXPECT_DOUBLE_EQ(p.rho(), 0.5);
    EXPECT_EQ(p.c(), 2);
}

TEST(Validate, RejectsBadRates) {
    for (const QueueParams& q : {QueueParams{0.0, 1.0, 1.0, 2}, QueueParams{1.0, -1.0, 1.0, 2},
                                 QueueParams{1.0, 1.0, 0.0, 2}, QueueParams{1.0, 1.0, 1.0, 0}}) {
        try {
            validate(q);
            FAIL() << "accepted invalid parameters";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidParameter);
        }
    }
}

TEST(Validate, UnstableCarriesRho) {
    try {
        validate({3.0, 1.0, 1.0, 2});
        FAIL();
    } catch (const UnstableError& e) {
        EXPECT_EQ(e.code(), ErrorCode::Unstable);
        EXPECT_DOUBLE_EQ(e.rho(), 1.5);
    }
    EXPECT_THROW(validate({2.0, 1.0, 1.0, 2}), UnstableError);  // rho = 1 exactly
}

TEST(Params, FromRho) {
    const QueueParams q = QueueParams::from_rho(0.5, 2.0, 1.0, 20);
    EXPECT_DOUBLE_EQ(q.lambda, 20.0);
    EXPECT_DOUBLE_EQ(q.rho(), 0.5);
}

TEST(StateSpace, SetupCount) {
    EXPECT_EQ(setup_count({0, 0}, 3), 0);
    EXPECT_EQ(setup_count({0, 2}, 3), 2);
    EXPECT_EQ(setup_count({1, 7}, 3), 2);
    EXPECT_EQ(setup_count({3, 9}, 3), 0);
    EXPECT_TRUE(in_state_space({2, 2}, 3));
    EXPECT_FALSE(in_state_space({3, 2}, 3));
    EXPECT_FALSE(in_state_space({4, 9}, 3));
}

TEST(Transitions, IdleSystem) {
    const ValidatedParams p = validate({1.0, 1.0, 2.0, 2});
    const auto t = transition_rates({0, 0}, p);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].to, (State{0, 1}));
    EXPECT_DOUBLE_EQ(t[0].rate, 1.0);
}

TEST(Transitions, LastJobLeavesServerOff) {
    const ValidatedParams p = validate({1.0, 1.0, 2.0, 2});
    const auto t = transition_rates({1, 1}, p);
    // no one waits, so no setup is running
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[1].to, (State{0, 0}));
    EXPECT_DOUBLE_EQ(t[1].rate, 1.0);
}

TEST(Transitions, SetupRateUsesMinimum) {
    const ValidatedParams p = validate({1.0, 1.0, 0.5, 3});
    // two jobs, nobody active: two setups
    auto t = transition_rates({0, 2}, p);
    EXPECT_DOUBLE_EQ(t.back().rate, 1.0);
    // many jobs, one active: c - i = 2 setups
    t = transition_rates({1, 8}, p);
    EXPECT_EQ(t.back().to, (State{2, 8}));
    EXPECT_DOUBLE_EQ(t.back().rate, 1.0);
    EXPECT_EQ(t[1].to, (State{1, 7}));
}

TEST(Transitions, OutflowMatchesSum) {
    const ValidatedParams p = validate({2.0, 1.0, 0.3, 4});
    for (int j = 0; j < 12; ++j)
        for (int i = 0; i <= std::min(j, 4); ++i) {
            const auto t = transition_rates({i, j}, p);
            const double s = std::accumulate(t.begin(), t.end(), 0.0,
                                             [](double a, const Transition& x) { return a + x.rate; });
            EXPECT_DOUBLE_EQ(total_outflow({i, j}, p), s);
        }
    EXPECT_THROW(transition_rates({5, 6}, p), Error);
}

TEST(ErlangC, SingleServerIsRho) { EXPECT_NEAR(erlang_c(1, 0.3), 0.3, 1e-15); }

TEST(ErlangC, TwoServersClosedForm) {
    // a = 1, c = 2: (a^2/2 * 2/(2-a)) / (1 + a + a^2/2 * 2/(2-a)) = 1/3
    EXPECT_NEAR(erlang_c(2, 1.0), 1.0 / 3.0, 1e-15);
}

TEST(MmcBaseline, CostFormula) {
    const ValidatedParams p = validate(QueueParams::from_rho(0.5, 1.0, 1.0, 20));
    EXPECT_NEAR(mmc_baseline(p, CostParams{}).cost, 16.0, 1e-12);
}

TEST(MmcBaseline, MeanJobsSingleServer) {
    const ValidatedParams p = validate({0.6, 1.0, 1.0, 1});
    EXPECT_NEAR(mmc_baseline(p, CostParams{}).mean_jobs, 0.6 / 0.4, 1e-12);
}

TEST(MmcPmf, NormalizedAndGeometricForOneServer) {
    const ValidatedParams p = validate({0.5, 1.0, 1.0, 1});
    const auto w = mmc_pmf(p, 80);
    EXPECT_NEAR(w[0], 0.5, 1e-14);
    EXPECT_NEAR(w[3], 0.5 * 0.125, 1e-14);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
}

TEST(Costs, RejectNegative) {
    CostParams k;
    k.c_idle = -0.1;
    EXPECT_THROW(k.check(), Error);
}
