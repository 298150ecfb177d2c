#include "mmcsetup/ctmc_oracle.hpp"

#include "support/gth_oracle.hpp"

#include <gtest/gtest.h>

using namespace mmcsetup;

TEST(TruncatedCtmc, StateCount) {
    const ValidatedParams p = validate({1.0, 1.0, 1.0, 3});
    const TruncatedCtmc chain(p, 10);
    // levels 0..3 hold 1+2+3+4 states, levels 4..10 hold 4 each
    EXPECT_EQ(chain.size(), 10 + 7 * 4);
    EXPECT_EQ(chain.index({0, 0}), 0);
    EXPECT_EQ(chain.index({1, 1}), 2);
    EXPECT_THROW(TruncatedCtmc(p, 7), Error);
}

TEST(TruncatedCtmc, GeneratorRowsSumToZero) {
    const ValidatedParams p = validate({1.7, 1.0, 0.3, 4});
    const TruncatedCtmc chain(p, 20);
    const Eigen::SparseMatrix<double> q = chain.generator();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(chain.size());
    EXPECT_LT((q * ones).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(SolveTruncated, MatchesIndependentElimination) {
    const ValidatedParams p = validate({1.5, 1.0, 0.3, 3});
    const OracleSolution o = solve_truncated(p, 150);
    const auto ref = gth::solve({1.5, 1.0, 0.3, 3}, 150);
    for (int j = 0; j <= 150; ++j)
        for (int i = 0; i <= std::min(j, 3); ++i)
            EXPECT_NEAR(o.distribution.prob(i, j), ref.prob(i, j), 1e-14);
    EXPECT_LT(o.balance_residual, 1e-13);
    EXPECT_NEAR(o.distribution.total_mass(), 1.0, 1e-13);
}

TEST(SolveTruncated, ReportsInsufficientTruncation) {
    const ValidatedParams p = validate(QueueParams::from_rho(0.9, 1.0, 0.01, 3));
    try {
        solve_truncated(p, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TruncationInsufficient);
    }
}

TEST(ChooseTruncation, LeavesNegligibleMass) {
    for (double alpha : {0.01, 1.0, 10.0}) {
        const ValidatedParams p = validate(QueueParams::from_rho(0.7, 1.0, alpha, 5));
        const int j_max = choose_truncation(p, 1e-11);
        EXPECT_GE(j_max, 10);
        const OracleSolution o = solve_truncated(p, j_max, 1e-9);
        EXPECT_LT(o.truncation_mass, 1e-9) << alpha;
    }
}

TEST(ChooseTruncation, SlowSetupNeedsMoreLevels) {
    const ValidatedParams fast = validate(QueueParams::from_rho(0.5, 1.0, 10.0, 5));
    const ValidatedParams slow = validate(QueueParams::from_rho(0.5, 1.0, 0.01, 5));
    EXPECT_GT(choose_truncation(slow, 1e-10), choose_truncation(fast, 1e-10));
}
