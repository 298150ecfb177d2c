#pragma once

#include "mmcsetup/errors.hpp"
#include "mmcsetup/matrix.hpp"
#include "mmcsetup/pole_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace mmcsetup {

/// Row i tail generating function sum_{k>=0} pi_{i,c+k} z^k in partial
/// fractions over `nodes` (see PoleRow).
struct PoleTail {
    std::vector<wide_real> nodes;
    std::vector<PoleRow> rows;
};

/// (pi_{0,c+k}, ..., pi_{c,c+k}) = top * R^k, k >= 1, where top is level c.
struct GeometricTail {
    std::vector<double> top;
    Matrix rate;
};

/// Explicit level vectors for c+1 .. c+K; zero beyond (truncated chains).
struct ExplicitTail {
    std::vector<std::vector<double>> levels;
};

using TailRepresentation = std::variant<PoleTail, GeometricTail, ExplicitTail>;

/// Stationary joint distribution pi_{i,j} of (active servers, jobs).
///
/// States with j <= c are stored explicitly; the tail j > c is kept in the
/// exact form produced by the solver so infinite sums are evaluated in closed
/// form rather than by truncation.
class JointDistribution {
public:
    /// `boundary[i][j - i]` holds pi_{i,j} for i <= j <= c.
    JointDistribution(int c, std::vector<std::vector<double>> boundary, TailRepresentation tail)
        : c_(c), boundary_(std::move(boundary)), tail_(std::move(tail)) {
        if (static_cast<int>(boundary_.size()) != c_ + 1)
            throw Error(ErrorCode::InternalInconsistency, "boundary must have c+1 rows");
        for (int i = 0; i <= c_; ++i)
            if (static_cast<int>(boundary_[static_cast<std::size_t>(i)].size()) != c_ - i + 1)
                throw Error(ErrorCode::InternalInconsistency, "boundary row has wrong length");
        precompute_tail_sums();
    }

    [[nodiscard]] int servers() const noexcept { return c_; }
    [[nodiscard]] const TailRepresentation& tail() const noexcept { return tail_; }
    [[nodiscard]] const std::vector<std::vector<double>>& boundary() const noexcept {
        return boundary_;
    }

    [[nodiscard]] double prob(int i, int j) const {
        if (i < 0 || i > c_ || j < i)
            return 0.0;
        if (j <= c_)
            return boundary_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)];
        return tail_level(j - c_)[static_cast<std::size_t>(i)];
    }

    /// (pi_{0,j}, ..., pi_{min(j,c),j}).
    [[nodiscard]] std::vector<double> level(int j) const {
        if (j > c_)
            return tail_level(j - c_);
        std::vector<double> out(static_cast<std::size_t>(j) + 1);
        for (int i = 0; i <= j; ++i)
            out[static_cast<std::size_t>(i)] = prob(i, j);
        return out;
    }

    /// P(N = j).
    [[nodiscard]] double level_mass(int j) const { return sum(level(j)); }

    /// pi_{i,j} for j in [j_from, j_to], evaluated in one sweep.
    [[nodiscard]] std::vector<double> row_values(int i, int j_from, int j_to) const {
        std::vector<double> out;
        if (j_to < j_from)
            return out;
        out.reserve(static_cast<std::size_t>(j_to - j_from) + 1);
        int j = j_from;
        for (; j <= std::min(j_to, c_); ++j)
            out.push_back(prob(i, j));
        if (j > j_to)
            return out;
        if (const auto* g = std::get_if<GeometricTail>(&tail_)) {
            std::vector<double> v = g->top;
            for (int k = 1; k < j - c_; ++k)
                v = vec_mat(v, g->rate);
            for (; j <= j_to; ++j) {
                v = vec_mat(v, g->rate);
                out.push_back(v[static_cast<std::size_t>(i)]);
            }
        } else {
            for (; j <= j_to; ++j)
                out.push_back(prob(i, j));
        }
        return out;
    }

    /// sum_{k >= k0} pi_{i,c+k} for k0 >= 1.
    [[nodiscard]] double row_tail_mass(int i, int k0) const {
        const auto ii = static_cast<std::size_t>(i);
        if (k0 <= 1)
            return tail_mass_[ii];
        return std::visit(
            [&](const auto& t) -> double {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, PoleTail>) {
                    wide_real s = pole_value(t.rows[ii], t.nodes, 1);
                    for (int k = 0; k < k0; ++k)
                        s -= pole_series_coefficient(t.rows[ii], t.nodes, k);
                    return to_double(s);
                } else if constexpr (std::is_same_v<T, GeometricTail>) {
                    std::vector<double> v = t.top;
                    for (int k = 0; k < k0; ++k)
                        v = vec_mat(v, t.rate);
                    return solve_row_upper(v, Matrix::identity(t.rate.rows()) - t.rate)[ii];
                } else {
                    double s = 0.0;
                    for (std::size_t k = static_cast<std::size_t>(k0); k <= t.levels.size(); ++k)
                        s += t.levels[k - 1][ii];
                    return s;
                }
            },
            tail_);
    }

    /// sum_{k >= 1} k * pi_{i,c+k}.
    [[nodiscard]] double row_tail_first_moment(int i) const {
        return tail_moment_[static_cast<std::size_t>(i)];
    }

    /// pi_i = P(C = i).
    [[nodiscard]] double row_mass(int i) const {
        return sum(boundary_[static_cast<std::size_t>(i)]) + tail_mass_[static_cast<std::size_t>(i)];
    }

    [[nodiscard]] std::vector<double> server_marginal() const {
        std::vector<double> out(static_cast<std::size_t>(c_) + 1);
        for (int i = 0; i <= c_; ++i)
            out[static_cast<std::size_t>(i)] = row_mass(i);
        return out;
    }

    [[nodiscard]] double total_mass() const { return sum(server_marginal()); }

private:
    [[nodiscard]] std::vector<double> tail_level(int k) const {
        const auto n = static_cast<std::size_t>(c_) + 1;
        return std::visit(
            [&](const auto& t) -> std::vector<double> {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, PoleTail>) {
                    std::vector<double> out(n, 0.0);
                    for (std::size_t i = 0; i < n; ++i)
                        out[i] = to_double(pole_series_coefficient(t.rows[i], t.nodes, k));
                    return out;
                } else if constexpr (std::is_same_v<T, GeometricTail>) {
                    std::vector<double> v = t.top;
                    for (int s = 0; s < k; ++s)
                        v = vec_mat(v, t.rate);
                    return v;
                } else {
                    if (static_cast<std::size_t>(k) > t.levels.size())
                        return std::vector<double>(n, 0.0);
                    return t.levels[static_cast<std::size_t>(k) - 1];
                }
            },
            tail_);
    }

    void precompute_tail_sums() {
        const auto n = static_cast<std::size_t>(c_) + 1;
        tail_mass_.assign(n, 0.0);
        tail_moment_.assign(n, 0.0);
        std::visit(
            [&](const auto& t) {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, PoleTail>) {
                    // T_i(1) - pi_{i,c} and T_i'(1)
                    for (std::size_t i = 0; i < n; ++i) {
                        tail_mass_[i] = to_double(pole_value(t.rows[i], t.nodes, 1) -
                                                  pole_series_coefficient(t.rows[i], t.nodes, 0));
                        tail_moment_[i] = to_double(pole_derivative(t.rows[i], t.nodes, 1, 1));
                    }
                } else if constexpr (std::is_same_v<T, GeometricTail>) {
                    const Matrix i_minus_r = Matrix::identity(n) - t.rate;
                    const auto first = solve_row_upper(vec_mat(t.top, t.rate), i_minus_r);
                    tail_mass_ = first;
                    tail_moment_ = solve_row_upper(first, i_minus_r);
                } else {
                    for (std::size_t k = 1; k <= t.levels.size(); ++k)
                        for (std::size_t i = 0; i < n; ++i) {
                            tail_mass_[i] += t.levels[k - 1][i];
                            tail_moment_[i] += static_cast<double>(k) * t.levels[k - 1][i];
                        }
                }
            },
            tail_);
    }

    int c_;
    std::vector<std::vector<double>> boundary_;
    TailRepresentation tail_;
    std::vector<double> tail_mass_;
    std::vector<double> tail_moment_;
};

}  // namespace mmcsetup
