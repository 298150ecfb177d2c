#pragma once

// Matrix-analytic solver. Level = number of jobs n, phase = number of active
// servers i (0..min(n, c)). Levels n >= c are homogeneous, so the stationary
// vectors satisfy pi_n = pi_{n-1} R^{(n)} with R^{(n)} = R for n > c.

#include "mmcsetup/core_model.hpp"
#include "mmcsetup/errors.hpp"
#include "mmcsetup/joint_distribution.hpp"
#include "mmcsetup/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace mmcsetup {

/// Generator blocks Q_1^{(n)} (up), Q_0^{(n)} (local) and Q_{-1}^{(n)} (down).
/// `up` and `local` are stored for n = 0..c, `down` for n = 1..c+1; beyond
/// those indices the blocks repeat.
struct QbdBlocks {
    int c = 0;
    std::vector<Matrix> up;
    std::vector<Matrix> local;
    std::vector<Matrix> down;

    [[nodiscard]] const Matrix& up_at(int n) const { return up[clamp(n, c)]; }
    [[nodiscard]] const Matrix& local_at(int n) const { return local[clamp(n, c)]; }
    [[nodiscard]] const Matrix& down_at(int n) const { return down[clamp(n, c + 1)]; }

    [[nodiscard]] const Matrix& q_up() const { return up[static_cast<std::size_t>(c)]; }
    [[nodiscard]] const Matrix& q_local() const { return local[static_cast<std::size_t>(c)]; }
    [[nodiscard]] const Matrix& q_down() const { return down[static_cast<std::size_t>(c) + 1]; }

private:
    static std::size_t clamp(int n, int top) { return static_cast<std::size_t>(n < top ? n : top); }
};

inline std::size_t level_size(int n, int c) { return static_cast<std::size_t>(std::min(n, c)) + 1; }

inline QbdBlocks build_blocks(const ValidatedParams& p) {
    const int c = p.c();
    const double lambda = p.lambda();
    QbdBlocks b;
    b.c = c;
    b.up.resize(static_cast<std::size_t>(c) + 1);
    b.local.resize(static_cast<std::size_t>(c) + 1);
    b.down.resize(static_cast<std::size_t>(c) + 2);
    for (int n = 0; n <= c; ++n) {
        const auto m = level_size(n, c);
        const auto next = level_size(n + 1, c);
        Matrix up(m, next);
        Matrix local(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            const int phase = static_cast<int>(i);
            const int setups = std::min(n - phase, c - phase);
            up(i, i) = lambda;
            local(i, i) = -(lambda + phase * p.mu() + setups * p.alpha());
            if (setups > 0)
                local(i, i + 1) = setups * p.alpha();
        }
        b.up[static_cast<std::size_t>(n)] = std::move(up);
        b.local[static_cast<std::size_t>(n)] = std::move(local);
    }
    for (int n = 1; n <= c + 1; ++n) {
        const auto m = level_size(n, c);
        const auto prev = level_size(n - 1, c);
        Matrix down(m, prev);
        for (std::size_t i = 0; i < m; ++i) {
            const int phase = static_cast<int>(i);
            const double rate = phase * p.mu();
            if (phase < n)
                down(i, i) = rate;  // a waiting job is taken, or phase 0 (rate 0)
            else
                down(i, i - 1) = rate;  // j == i: the server turns off
        }
        b.down[static_cast<std::size_t>(n)] = std::move(down);
    }
    return b;
}

/// Homogeneous rate matrix R, the minimal nonnegative solution of
/// Q_1 + R Q_0 + R^2 Q_{-1} = 0. Upper triangular; filled diagonal first, then
/// by increasing distance from the diagonal.
inline Matrix rate_matrix_R(const ValidatedParams& p) {
    const int c = p.c();
    const double lambda = p.lambda();
    const double mu = p.mu();
    const double alpha = p.alpha();
    const auto n = static_cast<std::size_t>(c) + 1;
    Matrix r(n, n);
    for (int i = 0; i <= c; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        if (i == 0) {
            r(ii, ii) = lambda / (lambda + c * alpha);
        } else if (i == c) {
            r(ii, ii) = lambda / (c * mu);
        } else {
            const double b = lambda + i * mu + (c - i) * alpha;
            r(ii, ii) = 2.0 * lambda / (b + std::sqrt(b * b - 4.0 * i * lambda * mu));
        }
    }
    for (int h = 1; h <= c; ++h) {
        for (int i = 0; i + h <= c; ++i) {
            const int j = i + h;
            const auto ii = static_cast<std::size_t>(i);
            const auto jj = static_cast<std::size_t>(j);
            double mid = 0.0;
            for (int k = i + 1; k < j; ++k)
                mid += r(ii, static_cast<std::size_t>(k)) * r(static_cast<std::size_t>(k), jj);
            const double num = (c - j + 1) * alpha * r(ii, jj - 1) + j * mu * mid;
            const double den = lambda + (c - j) * alpha + j * mu - j * mu * (r(ii, ii) + r(jj, jj));
            r(ii, jj) = num / den;
        }
    }
    return r;
}

/// Homogeneous G, the minimal nonnegative solution of Q_{-1} + Q_0 G + Q_1 G^2 = 0.
inline Matrix g_matrix(const ValidatedParams& p) {
    const int c = p.c();
    const double lambda = p.lambda();
    const double mu = p.mu();
    const double alpha = p.alpha();
    const auto n = static_cast<std::size_t>(c) + 1;
    Matrix g(n, n);
    std::vector<double> q(n);
    for (int i = 0; i <= c; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        q[ii] = lambda + (c - i) * alpha + i * mu;
        if (i == 0) {
            g(ii, ii) = 0.0;
        } else if (i == c) {
            g(ii, ii) = 1.0;
        } else {
            const double b = q[ii];
            g(ii, ii) = 2.0 * i * mu / (b + std::sqrt(b * b - 4.0 * i * lambda * mu));
        }
    }
    for (int h = 1; h <= c; ++h) {
        for (int i = 0; i + h <= c; ++i) {
            const int j = i + h;
            const auto ii = static_cast<std::size_t>(i);
            const auto jj = static_cast<std::size_t>(j);
            double mid = 0.0;
            for (int k = i + 1; k < j; ++k)
                mid += g(ii, static_cast<std::size_t>(k)) * g(static_cast<std::size_t>(k), jj);
            const double num = (c - i) * alpha * g(ii + 1, jj) + lambda * mid;
            const double den = q[ii] - lambda * (g(ii, ii) + g(jj, jj));
            g(ii, jj) = num / den;
        }
    }
    return g;
}

namespace detail {

/// a * b where b has at most one nonzero per row (the down blocks).
inline Matrix times_sparse_rows(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t d = 0; d < b.cols(); ++d) {
            const double v = b(k, d);
            if (v == 0.0)
                continue;
            for (std::size_t r = 0; r < a.rows(); ++r)
                out(r, d) += a(r, k) * v;
        }
    }
    return out;
}

}  // namespace detail

/// Inverse of an upper triangular matrix, one row at a time from the bottom.
inline Matrix invert_upper(const Matrix& m) {
    const std::size_t n = m.rows();
    for (std::size_t l = 0; l < n; ++l)
        if (std::abs(m(l, l)) < 1e-14)
            throw Error(ErrorCode::SingularDiagonal,
                        "diagonal entry " + std::to_string(l) + " of the level matrix vanishes");
    Matrix x(n, n);
    std::vector<double> acc(n);
    for (std::size_t k = n; k-- > 0;) {
        std::fill(acc.begin() + static_cast<std::ptrdiff_t>(k), acc.end(), 0.0);
        acc[k] = 1.0;
        auto mk = m.row(k);
        for (std::size_t l = k + 1; l < n; ++l) {
            const double w = mk[l];
            if (w == 0.0)
                continue;
            auto xl = x.row(l);
            for (std::size_t d = l; d < n; ++d)
                acc[d] -= w * xl[d];
        }
        auto xk = x.row(k);
        for (std::size_t d = k; d < n; ++d)
            xk[d] = acc[d] / mk[k];
    }
    return x;
}

/// Solves M Y = B for Y with M upper triangular, column by column.
inline Matrix solve_upper_left(const Matrix& m, const Matrix& b) {
    const std::size_t n = m.rows();
    for (std::size_t l = 0; l < n; ++l)
        if (std::abs(m(l, l)) < 1e-14)
            throw Error(ErrorCode::SingularMatrix, "triangular system is singular");
    Matrix y(n, b.cols());
    std::vector<double> col(n);
    for (std::size_t d = 0; d < b.cols(); ++d) {
        for (std::size_t k = 0; k < n; ++k)
            col[k] = b(k, d);
        const auto x = solve_col_upper(m, col);
        for (std::size_t k = 0; k < n; ++k)
            y(k, d) = x[k];
    }
    return y;
}

/// -Q_0^{(n)} - Q_1^{(n)} G^{(n+1)}, upper triangular since first passage
/// never lowers the phase below its starting value.
inline Matrix passage_matrix(const QbdBlocks& blocks, int n, const Matrix& g_next) {
    Matrix m = blocks.local_at(n);
    m *= -1.0;
    m -= blocks.up_at(n) * g_next;
    return m;
}

/// Same matrix with each diagonal entry rebuilt from its row: the off-diagonal
/// magnitudes plus the rate of dropping a level. This holds exactly because
/// G^{(n+1)} is stochastic, and it avoids the cancellation in
/// lambda (1 - g_{i,i}) that otherwise grows by about lambda / (i mu) per level.
inline Matrix passage_matrix_balanced(const QbdBlocks& blocks, int n, const Matrix& g_next) {
    Matrix m = passage_matrix(blocks, n, g_next);
    const Matrix& down = blocks.down_at(n);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double d = 0.0;
        for (std::size_t k = 0; k < down.cols(); ++k)
            d += down(i, k);
        for (std::size_t k = i + 1; k < m.cols(); ++k)
            d -= m(i, k);
        m(i, i) = d;
    }
    return m;
}

struct LevelMatrices {
    std::vector<Matrix> rate;     ///< R^{(n)}, n = 1..c (index 0 empty)
    std::vector<Matrix> passage;  ///< G^{(n)}, n = 1..c (index 0 empty)
};

/// R^{(n)} and G^{(n)} for the levels below c from one inverse per level:
/// with M_n the balanced passage matrix built on G^{(n+1)} (G above c),
/// G^{(n)} = M_n^{-1} Q_{-1}^{(n)} and R^{(n)} = Q_1^{(n-1)} M_n^{-1}.
/// Every step adds nonnegative terms only.
inline LevelMatrices level_matrices(const QbdBlocks& blocks, const Matrix& g) {
    const int c = blocks.c;
    LevelMatrices out;
    out.rate.resize(static_cast<std::size_t>(c) + 1);
    out.passage.resize(static_cast<std::size_t>(c) + 1);
    const Matrix* next = &g;
    for (int n = c; n >= 1; --n) {
        const auto nn = static_cast<std::size_t>(n);
        const Matrix inv = invert_upper(passage_matrix_balanced(blocks, n, *next));
        out.passage[nn] = detail::times_sparse_rows(inv, blocks.down_at(n));
        out.rate[nn] = blocks.up_at(n - 1) * inv;
        next = &out.passage[nn];
    }
    return out;
}

inline std::vector<Matrix> nonhomogeneous_R(const QbdBlocks& blocks, const Matrix& g) {
    return level_matrices(blocks, g).rate;
}

inline std::vector<Matrix> g_levels(const QbdBlocks& blocks, const Matrix& g) {
    return level_matrices(blocks, g).passage;
}

/// R = Q_1 (-Q_0 - Q_1 G)^{-1}.
inline Matrix rate_from_g(const QbdBlocks& blocks, const Matrix& g) {
    const Matrix m = passage_matrix(blocks, blocks.c, g);
    return blocks.q_up() * solve_upper_left(m, Matrix::identity(m.rows()));
}

struct QbdSolution {
    QueueParams params;
    Matrix rate;                          ///< R
    std::vector<Matrix> rate_levels;      ///< R^{(n)}, n = 1..c
    Matrix passage;                       ///< G
    std::vector<Matrix> passage_levels;   ///< G^{(n)}, n = 1..c
    std::vector<std::vector<double>> levels;  ///< pi_0 .. pi_c

    [[nodiscard]] int servers() const noexcept { return params.c; }

    /// pi_{c+k} = pi_c R^k.
    [[nodiscard]] std::vector<double> level(int n) const {
        const int c = params.c;
        if (n <= c)
            return levels[static_cast<std::size_t>(n)];
        std::vector<double> v = levels[static_cast<std::size_t>(c)];
        for (int k = c; k < n; ++k)
            v = vec_mat(v, rate);
        return v;
    }

    [[nodiscard]] JointDistribution distribution() const {
        const int c = params.c;
        std::vector<std::vector<double>> boundary(static_cast<std::size_t>(c) + 1);
        for (int i = 0; i <= c; ++i)
            for (int j = i; j <= c; ++j)
                boundary[static_cast<std::size_t>(i)].push_back(
                    levels[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        return JointDistribution(c, std::move(boundary),
                                 GeometricTail{levels[static_cast<std::size_t>(c)], rate});
    }
};

inline constexpr double qbd_boundary_tolerance = 1e-10;

inline QbdSolution stationary(const ValidatedParams& p) {
    const int c = p.c();
    const QbdBlocks blocks = build_blocks(p);
    QbdSolution sol;
    sol.params = p.raw();
    sol.rate = rate_matrix_R(p);
    sol.passage = g_matrix(p);
    LevelMatrices lv = level_matrices(blocks, sol.passage);
    sol.rate_levels = std::move(lv.rate);
    sol.passage_levels = std::move(lv.passage);

    // pi_n = pi_{n-1} R^{(n)} from pi_0 = 1. Levels can grow by hundreds of
    // orders of magnitude, so earlier levels are rescaled on the way up; those
    // that underflow carry no representable mass anyway.
    sol.levels.resize(static_cast<std::size_t>(c) + 1);
    sol.levels[0] = {1.0};
    for (int n = 1; n <= c; ++n) {
        auto& lv = sol.levels[static_cast<std::size_t>(n)];
        lv = vec_mat(sol.levels[static_cast<std::size_t>(n - 1)], sol.rate_levels[static_cast<std::size_t>(n)]);
        const double peak = *std::max_element(lv.begin(), lv.end());
        if (peak > 1e100)
            for (int k = 0; k <= n; ++k)
                for (double& v : sol.levels[static_cast<std::size_t>(k)])
                    v /= peak;
    }

    const auto& top = sol.levels[static_cast<std::size_t>(c)];
    const Matrix i_minus_r = Matrix::identity(top.size()) - sol.rate;
    double total = sum(solve_row_upper(vec_mat(top, sol.rate), i_minus_r));
    for (const auto& lv : sol.levels)
        total += sum(lv);
    if (!(total > 0.0) || !std::isfinite(total))
        throw Error(ErrorCode::NumericalBreakdown, "normalization constant is not finite");
    for (auto& lv : sol.levels)
        for (double& v : lv)
            v /= total;

    // Level 0 holds the single state (0,0). Its balance equation is not used
    // above, so its residual flow checks the whole construction.
    const Matrix boundary = blocks.local_at(0) + sol.rate_levels[1] * blocks.down_at(1);
    const double residual = sol.levels[0][0] * boundary(0, 0);
    if (!(std::abs(residual) <= qbd_boundary_tolerance * p.lambda()))
        throw Error(ErrorCode::DegenerateBoundary, "boundary balance residual " + std::to_string(residual));
    return sol;
}

}  // namespace mmcsetup
