#include "mmcsetup/balance.hpp"
#include "mmcsetup/gf_solver.hpp"
#include "mmcsetup/qbd_solver.hpp"

#include "support/gth_oracle.hpp"

#include <gtest/gtest.h>

using namespace mmcsetup;

namespace {

double row_sum_gap(const Matrix& g) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j)
            s += g(i, j);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

}  // namespace

TEST(Blocks, GeneratorRowsSumToZero) {
    const ValidatedParams p = validate({2.0, 1.0, 0.5, 3});
    const QbdBlocks b = build_blocks(p);
    for (int n = 0; n <= 5; ++n) {
        const Matrix& up = b.up_at(n);
        const Matrix& local = b.local_at(n);
        for (std::size_t i = 0; i < local.rows(); ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < up.cols(); ++k)
                s += up(i, k);
            for (std::size_t k = 0; k < local.cols(); ++k)
                s += local(i, k);
            if (n > 0)
                for (std::size_t k = 0; k < b.down_at(n).cols(); ++k)
                    s += b.down_at(n)(i, k);
            EXPECT_NEAR(s, 0.0, 1e-14) << "level " << n << " phase " << i;
        }
    }
}

TEST(Blocks, DiagonalIncludesArrivals) {
    const ValidatedParams p = validate({2.0, 1.0, 0.5, 3});
    const QbdBlocks b = build_blocks(p);
    // (1, 4): arrival 2, service 1, two setups at 0.5 each
    EXPECT_DOUBLE_EQ(b.q_local()(1, 1), -(2.0 + 1.0 + 1.0));
}

class Homogeneous : public ::testing::TestWithParam<std::tuple<double, double, int>> {};

TEST_P(Homogeneous, RAndGCertificates) {
    const auto [rho, alpha, c] = GetParam();
    const ValidatedParams p = validate(QueueParams::from_rho(rho, 1.0, alpha, c));
    const QbdBlocks b = build_blocks(p);
    const Matrix r = rate_matrix_R(p);
    const Matrix g = g_matrix(p);
    EXPECT_LT((b.q_up() + r * b.q_local() + r * r * b.q_down()).norm_inf(), 1e-12);
    EXPECT_LT((b.q_down() + b.q_local() * g + b.q_up() * g * g).norm_inf(), 1e-12);
    EXPECT_LT(row_sum_gap(g), 1e-10);
    const RootTable roots = characteristic_roots(p);
    for (int i = 0; i <= c; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        EXPECT_NEAR(g(ii, ii), to_double(roots.z[ii]), 1e-12);
        EXPECT_NEAR(r(ii, ii) * to_double(roots.zhat[ii]), 1.0, 1e-12);
    }
    EXPECT_LT((r - rate_from_g(b, g)).max_abs(), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Grid, Homogeneous,
                         ::testing::Combine(::testing::Values(0.3, 0.9), ::testing::Values(0.01, 1.0, 10.0),
                                            ::testing::Values(1, 4, 12)));

TEST(LevelMatrices, SatisfyTheLevelEquations) {
    const ValidatedParams p = validate(QueueParams::from_rho(0.7, 1.0, 0.2, 6));
    const QbdBlocks b = build_blocks(p);
    const Matrix g = g_matrix(p);
    const LevelMatrices lv = level_matrices(b, g);
    const Matrix r = rate_matrix_R(p);
    for (int n = 1; n <= 6; ++n) {
        const auto nn = static_cast<std::size_t>(n);
        const Matrix& above = n < 6 ? lv.rate[nn + 1] : r;
        const Matrix res = b.up_at(n - 1) + lv.rate[nn] * b.local_at(n) + lv.rate[nn] * above * b.down_at(n + 1);
        EXPECT_LT(res.norm_inf(), 1e-12) << n;
        EXPECT_LT(row_sum_gap(lv.passage[nn]), 1e-13) << n;
    }
}

TEST(InvertUpper, Identity) {
    Matrix m(3, 3);
    m(0, 0) = 2;
    m(0, 1) = -1;
    m(0, 2) = 0.5;
    m(1, 1) = 4;
    m(1, 2) = -2;
    m(2, 2) = 0.25;
    const Matrix x = invert_upper(m);
    EXPECT_LT((m * x - Matrix::identity(3)).max_abs(), 1e-15);
    Matrix s(2, 2);
    s(0, 0) = 1;
    EXPECT_THROW(invert_upper(s), Error);
}

class QbdAgainstReference : public ::testing::TestWithParam<std::tuple<double, double, double, int>> {};

TEST_P(QbdAgainstReference, JointPmf) {
    const auto [lambda, mu, alpha, c] = GetParam();
    const ValidatedParams p = validate({lambda, mu, alpha, c});
    const JointDistribution d = stationary(p).distribution();
    const auto ref = gth::solve({lambda, mu, alpha, c}, 700);
    double worst = 0.0;
    for (int j = 0; j <= c + 60; ++j)
        for (int i = 0; i <= std::min(j, c); ++i)
            worst = std::max(worst, std::abs(d.prob(i, j) - ref.prob(i, j)));
    EXPECT_LT(worst, 1e-12);
    EXPECT_NEAR(d.total_mass(), 1.0, 1e-13);
}

INSTANTIATE_TEST_SUITE_P(Points, QbdAgainstReference,
                         ::testing::Values(std::make_tuple(0.6, 1.0, 1.0, 1), std::make_tuple(1.0, 1.0, 1.0, 2),
                                           std::make_tuple(2.7, 1.0, 0.1, 3), std::make_tuple(3.5, 1.0, 2.0, 5),
                                           std::make_tuple(2.0, 0.5, 0.05, 6)));

TEST(Stationary, AgreesWithGeneratingFunctionSolver) {
    const ValidatedParams p = validate(QueueParams::from_rho(0.8, 1.0, 0.3, 10));
    const JointDistribution a = stationary(p).distribution();
    const JointDistribution b = solve_gf(p).distribution();
    for (int j = 0; j <= 60; ++j)
        for (int i = 0; i <= std::min(j, 10); ++i)
            EXPECT_NEAR(a.prob(i, j), b.prob(i, j), 1e-13);
}

TEST(Stationary, StaysNonnegativeForManyServersAndSlowSetup) {
    // Regression: the bottom levels carry masses far below the top ones.
    const ValidatedParams p = validate(QueueParams::from_rho(0.7, 1.0, 0.01, 50));
    const JointDistribution d = stationary(p).distribution();
    const BalanceCheck chk = balance_residual(d, p, 80);
    EXPECT_FALSE(chk.negative_mass);
    EXPECT_LT(chk.max_relative, 1e-9);
    EXPECT_NEAR(d.total_mass(), 1.0, 1e-12);
}
