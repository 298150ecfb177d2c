#pragma once

// Generating-function solver for the M/M/c/Setup joint distribution.
//
// Notation used throughout (i = active servers, j = jobs):
//   f_i(z)       = (lambda + i mu + (c-i) alpha) z - lambda z^2 - i mu
//   z_i, zhat_i  = roots of f_i with z_i <= 1 < zhat_i (z_0 = 0, z_c = 1)
//   T_i(z)       = sum_{j>=c} pi_{i,j} z^{j-c}
// Each T_i satisfies
//   f_i(z) T_i(z) = (c-i+1) alpha z T_{i-1}(z) + lambda pi_{i,c-1} z - i mu pi_{i,c},
// so it is rational with poles at zhat_0..zhat_i. With distinct poles
//   T_i(z) = sum_k A_{i,k} / (zhat_k - z),   pi_{i,j} = sum_k A_{i,k} zhat_k^{-(j-c+1)}.
// Coinciding poles (e.g. alpha = mu (1 - rho) makes every zhat_i equal 1/rho)
// are merged into one node and carried as higher-order terms.
//
// All arithmetic runs in wide_real: the A_{i,k} grow roughly geometrically in c
// and cancel in the tail sums.

#include "mmcsetup/balance.hpp"
#include "mmcsetup/core_model.hpp"
#include "mmcsetup/errors.hpp"
#include "mmcsetup/joint_distribution.hpp"
#include "mmcsetup/pole_expansion.hpp"
#include "mmcsetup/wide_real.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace mmcsetup {

/// Rising factorial (phi)_n = phi (phi+1) ... (phi+n-1), with (phi)_0 = 1.
template <typename Real>
Real pochhammer(Real phi, int n) {
    Real out = 1;
    for (int k = 0; k < n; ++k)
        out *= phi + k;
    return out;
}

inline double pochhammer(double phi, int n) { return pochhammer<double>(phi, n); }

/// x (x-1) ... (x-n+1).
template <typename Real>
Real falling_factorial(Real x, int n) {
    return pochhammer<Real>(x - n + 1, n);
}

/// Relative distance under which two poles are treated as one.
inline constexpr double pole_collision_tolerance = 1e-9;

struct RootTable {
    wide_real lambda = 0;
    std::vector<wide_real> linear;  ///< lambda + i mu + (c-i) alpha
    std::vector<wide_real> offset;  ///< i mu
    std::vector<wide_real> z;       ///< minor roots, z[0] = 0, z[c] = 1
    std::vector<wide_real> zhat;    ///< major roots, zhat[0] = (lambda + c alpha)/lambda, zhat[c] = c mu/lambda
    std::vector<wide_real> nodes;   ///< distinct pole locations, in order of first use
    std::vector<int> node_of;       ///< node index of zhat[i]

    [[nodiscard]] int servers() const noexcept { return static_cast<int>(z.size()) - 1; }
    [[nodiscard]] bool confluent() const noexcept { return nodes.size() < zhat.size(); }

    /// Pole location used for index i (zhat_i, or its merged node).
    [[nodiscard]] wide_real pole(int i) const {
        return nodes[static_cast<std::size_t>(node_of[static_cast<std::size_t>(i)])];
    }

    /// f_i(x) in factored form lambda (x - z_i)(zhat_i - x).
    [[nodiscard]] wide_real f(int i, wide_real x) const {
        const auto ii = static_cast<std::size_t>(i);
        return lambda * (x - z[ii]) * (zhat[ii] - x);
    }

    /// f_i(x) in expanded polynomial form (for residual checks).
    [[nodiscard]] wide_real f_poly(int i, wide_real x) const {
        const auto ii = static_cast<std::size_t>(i);
        return linear[ii] * x - lambda * x * x - offset[ii];
    }

    /// Pairs (a, b), a < b, whose poles were merged.
    [[nodiscard]] std::vector<std::pair<int, int>> collisions() const {
        std::vector<std::pair<int, int>> out;
        for (std::size_t a = 0; a < node_of.size(); ++a)
            for (std::size_t b = a + 1; b < node_of.size(); ++b)
                if (node_of[a] == node_of[b])
                    out.emplace_back(static_cast<int>(a), static_cast<int>(b));
        return out;
    }
};

inline RootTable characteristic_roots(const ValidatedParams& p) {
    const int c = p.c();
    const wide_real lambda = p.lambda();
    const wide_real mu = p.mu();
    const wide_real alpha = p.alpha();
    RootTable t;
    t.lambda = lambda;
    const auto n = static_cast<std::size_t>(c) + 1;
    t.linear.resize(n);
    t.offset.resize(n);
    t.z.resize(n);
    t.zhat.resize(n);
    for (int i = 0; i <= c; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const wide_real b = lambda + i * mu + (c - i) * alpha;
        const wide_real q = i * mu;
        t.linear[ii] = b;
        t.offset[ii] = q;
        if (i == 0) {
            t.z[ii] = 0;
            t.zhat[ii] = b / lambda;
        } else if (i == c) {
            t.z[ii] = 1;
            t.zhat[ii] = c * mu / lambda;
        } else {
            const wide_real s = b + wide_sqrt(b * b - 4 * lambda * q);
            t.zhat[ii] = s / (2 * lambda);
            t.z[ii] = 2 * q / s;
        }
    }

    // Cluster by sorted value, chaining neighbours closer than the tolerance.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return t.zhat[static_cast<std::size_t>(a)] < t.zhat[static_cast<std::size_t>(b)];
    });
    std::vector<int> leader(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto cur = static_cast<std::size_t>(order[k]);
        leader[cur] = order[k];
        if (k > 0) {
            const auto prev = static_cast<std::size_t>(order[k - 1]);
            if (t.zhat[cur] - t.zhat[prev] < pole_collision_tolerance * t.zhat[cur])
                leader[cur] = leader[prev];
        }
    }
    // The node of a cluster sits at the pole of its lowest index.
    std::vector<int> lowest(n, c + 1);
    for (std::size_t i = 0; i < n; ++i)
        lowest[static_cast<std::size_t>(leader[i])] =
            std::min(lowest[static_cast<std::size_t>(leader[i])], static_cast<int>(i));
    t.node_of.assign(n, -1);
    std::vector<int> node_for_leader(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto l = static_cast<std::size_t>(leader[i]);
        if (node_for_leader[l] < 0) {
            node_for_leader[l] = static_cast<int>(t.nodes.size());
            t.nodes.push_back(t.zhat[static_cast<std::size_t>(lowest[l])]);
        }
        t.node_of[i] = node_for_leader[l];
    }
    return t;
}

/// Throws DegeneratePoles on the first merged pair.
inline void require_distinct_poles(const RootTable& roots) {
    const auto pairs = roots.collisions();
    if (!pairs.empty())
        throw DegeneratePolesError(pairs.front().first, pairs.front().second,
                                   to_double(roots.zhat[static_cast<std::size_t>(pairs.front().second)]));
}

/// Row zero relative to pi_{0,0}: ratios for j = 0..c-1 and the geometric tail
/// ratio lambda/(lambda + c alpha) = 1/zhat_0 that applies from j = c on.
struct RowZero {
    std::vector<wide_real> ratios;
    wide_real tail_ratio = 0;
};

inline RowZero row_zero(const ValidatedParams& p) {
    const int c = p.c();
    const wide_real lambda = p.lambda();
    RowZero r;
    r.ratios.resize(static_cast<std::size_t>(c));
    r.ratios[0] = 1;
    for (int j = 1; j < c; ++j)
        r.ratios[static_cast<std::size_t>(j)] =
            r.ratios[static_cast<std::size_t>(j - 1)] * lambda / (lambda + j * wide_real(p.alpha()));
    r.tail_ratio = lambda / (lambda + c * wide_real(p.alpha()));
    return r;
}

/// Flow balance across the cut {active <= i}:
///   (i+1) mu pi_{i+1,i+1} = alpha sum_{j>i} min(j-i, c-i) pi_{i,j},
/// with the j >= c part equal to (c-i) T_i(1).
/// `row` holds pi_{i,j} for j = i..c.
inline wide_real cut_equation(const ValidatedParams& p, const RootTable& roots, int i,
                              std::span<const wide_real> row, const PoleRow& coeff) {
    const int c = p.c();
    wide_real s = 0;
    for (int j = i + 1; j <= c - 1; ++j)
        s += (j - i) * row[static_cast<std::size_t>(j - i)];
    s += (c - i) * pole_value(coeff, roots.nodes, 1);
    return wide_real(p.alpha()) * s / ((i + 1) * wide_real(p.mu()));
}

/// Coefficients of pi_{i,j} = a_j + b_j pi_{i,j-1} for j = i+1..c, stored at j-i-1.
struct RowCoefficients {
    std::vector<wide_real> a;
    std::vector<wide_real> b;
};

struct RowRecursion {
    RowCoefficients coeffs;
    std::vector<wide_real> row;  ///< pi_{i,j} for j = i..c
};

/// Interior row 1 <= i <= c-1 given pi_{i,i}, the previous row (j = i-1..c) and
/// its tail expansion. T_i must be analytic at z_i, which pins
///   a_c = (c-i+1) alpha z_i T_{i-1}(z_i) / (i mu),  b_c = lambda z_i / (i mu);
/// the remaining a, b come from a backward pass over the balance equations and a
/// forward pass fills the row.
inline RowRecursion row_recursion(const ValidatedParams& p, const RootTable& roots, int i,
                                  wide_real pi_ii, std::span<const wide_real> prev_row,
                                  const PoleRow& prev_coeff) {
    const int c = p.c();
    const wide_real lambda = p.lambda();
    const wide_real alpha = p.alpha();
    const wide_real serve = i * wide_real(p.mu());
    const auto len = static_cast<std::size_t>(c - i);
    RowRecursion out;
    out.coeffs.a.resize(len);
    out.coeffs.b.resize(len);
    auto& a = out.coeffs.a;
    auto& b = out.coeffs.b;

    const wide_real zi = roots.z[static_cast<std::size_t>(i)];
    a[len - 1] = (c - i + 1) * alpha * zi * pole_value(prev_coeff, roots.nodes, zi) / serve;
    b[len - 1] = lambda * zi / serve;

    // prev_row[j - (i-1)] = pi_{i-1,j}
    for (int j = c - 1; j >= i + 1; --j) {
        const auto at = static_cast<std::size_t>(j - i - 1);
        const wide_real denom = lambda + serve + (j - i) * alpha - serve * b[at + 1];
        if (!(denom > 0))
            throw Error(ErrorCode::NumericalBreakdown,
                        "nonpositive denominator in row " + std::to_string(i) + " at j = " +
                            std::to_string(j));
        const wide_real inflow = (j - i + 1) * alpha * prev_row[static_cast<std::size_t>(j - i + 1)];
        a[at] = (inflow + serve * a[at + 1]) / denom;
        b[at] = lambda / denom;
    }

    out.row.resize(len + 1);
    out.row[0] = pi_ii;
    for (std::size_t k = 1; k <= len; ++k)
        out.row[k] = a[k - 1] + b[k - 1] * out.row[k - 1];
    return out;
}

namespace detail {

/// First `count` Taylor coefficients in w of 1 / (x0 - s w), s = +-1.
inline std::vector<wide_real> inverse_series(wide_real x0, int s, std::size_t count) {
    std::vector<wide_real> out(count);
    const wide_real inv = 1 / x0;
    wide_real p = inv;
    for (std::size_t r = 0; r < count; ++r) {
        out[r] = p;
        p *= s * inv;
    }
    return out;
}

inline std::vector<wide_real> series_product(const std::vector<wide_real>& x, const std::vector<wide_real>& y,
                                             std::size_t count) {
    std::vector<wide_real> out(count, 0);
    for (std::size_t r = 0; r < count && r < x.size(); ++r)
        for (std::size_t q = 0; r + q < count && q < y.size(); ++q)
            out[r + q] += x[r] * y[q];
    return out;
}

}  // namespace detail

/// Tail expansion of row i (1 <= i <= c) from that of row i-1. For every node u
/// other than the pole v of f_i, the principal part of T_{i-1} at u is multiplied
/// by the Taylor series of phi(z) = (c-i+1) alpha z / f_i(z) about u; with simple
/// poles this is A_{i,k} = (c-i+1) alpha zhat_k A_{i-1,k} / f_i(zhat_k). At v the
/// higher orders come from the principal part of (c-i+1) alpha z T_{i-1}(z) /
/// (lambda (z - z_i)), and the simple-pole coefficient from T_i(z) ~ -pi_{i,c-1}/z:
///   A_{i,v,1} = pi_{i,c-1} - sum_{u != v} A_{i,u,1}   (pi_{c,c-1} = 0).
inline PoleRow pole_coefficients(const ValidatedParams& p, const RootTable& roots, int i,
                                 const PoleRow& prev_coeff, wide_real pi_i_c_minus_1) {
    const int c = p.c();
    const wide_real lambda = p.lambda();
    const wide_real kappa = (c - i + 1) * wide_real(p.alpha());
    const wide_real zi = roots.z[static_cast<std::size_t>(i)];
    const auto v = static_cast<std::size_t>(roots.node_of[static_cast<std::size_t>(i)]);
    const wide_real vi = roots.nodes[v];
    PoleRow out(roots.nodes.size());

    wide_real others = 0;
    for (std::size_t u = 0; u < prev_coeff.size(); ++u) {
        const auto& prev = prev_coeff[u];
        if (u == v || prev.empty())
            continue;
        const wide_real x = roots.nodes[u];
        const std::size_t order = prev.size();
        // phi(u - w) = (kappa/lambda) (u - w) / ((u - z_i) - w) / ((v - u) + w)
        auto phi = detail::series_product(detail::inverse_series(x - zi, 1, order),
                                          detail::inverse_series(vi - x, -1, order), order);
        for (std::size_t r = order; r-- > 0;)
            phi[r] = kappa / lambda * (x * phi[r] - (r > 0 ? phi[r - 1] : wide_real(0)));
        auto& dst = out[u];
        dst.assign(order, 0);
        for (std::size_t q = 0; q < order; ++q)
            for (std::size_t m = q; m < order; ++m)
                dst[q] += prev[m] * phi[m - q];
        others += dst[0];
    }

    const std::vector<wide_real> empty;
    const auto& at_v = v < prev_coeff.size() ? prev_coeff[v] : empty;
    const std::size_t order = at_v.size();
    auto& dst = out[v];
    dst.assign(order + 1, 0);
    if (order > 0) {
        // principal part of kappa z T_{i-1} at v, in w = v - z:
        // coefficient of w^{-s} is kappa (v A_s - A_{s+1})
        std::vector<wide_real> n_part(order + 1, 0);  // n_part[s] for s = 1..order
        for (std::size_t s = 1; s <= order; ++s)
            n_part[s] = kappa * (vi * at_v[s - 1] - (s < order ? at_v[s] : wide_real(0)));
        const auto chi = detail::inverse_series(vi - zi, 1, order);
        for (std::size_t q = 1; q <= order; ++q) {
            wide_real e = 0;
            for (std::size_t r = 0; q + r <= order; ++r)
                e += chi[r] / lambda * n_part[q + r];
            dst[q] = e;
        }
    }
    dst[0] = pi_i_c_minus_1 - others;
    return out;
}

/// Factorial moments at z = 1. `full[i][n]` is Pi_i^{(n)}(1) and `hat[i][n]` is
/// Pihat_i^{(n)}(1), where Pihat_i(z) = z^{c-i} T_i(z). Rows 0..c-1 of `hat`
/// carry one extra order because row c at order n consumes row c-1 at order n+1.
struct MomentTable {
    int n_max = 0;
    std::vector<std::vector<double>> full;
    std::vector<std::vector<double>> hat;
};

struct GfOptions {
    int moment_order = 4;
    /// Carry coinciding poles as higher-order terms; when false a collision
    /// raises DegeneratePoles.
    bool merge_confluent_poles = true;
    /// Check the result against the balance equations and reject it when the
    /// relative residual exceeds `certificate_tolerance`.
    bool certify = true;
    double certificate_tolerance = 1e-8;
};

struct GfSolution {
    QueueParams params;
    RootTable roots;
    std::vector<std::vector<double>> boundary;          ///< [i][j-i], j = i..c
    std::vector<std::vector<wide_real>> boundary_wide;  ///< same, unrounded
    std::vector<PoleRow> coeff;                         ///< tail expansion of each row
    std::vector<RowCoefficients> ab;                    ///< index i (entries 0 and c are empty)
    double pi00 = 0.0;
    MomentTable moments;
    double balance_certificate = 0.0;  ///< max relative balance residual for j <= c + 10

    [[nodiscard]] int servers() const noexcept { return params.c; }

    [[nodiscard]] JointDistribution distribution() const {
        return JointDistribution(params.c, boundary, PoleTail{roots.nodes, coeff});
    }

    /// Tail law pi_{i,j} from the expansion, valid for j >= c-1.
    [[nodiscard]] double tail_prob(int i, int j) const {
        return to_double(pole_series_coefficient(coeff[static_cast<std::size_t>(i)], roots.nodes, j - params.c));
    }

    /// Pi_i(1), the probability of i active servers.
    [[nodiscard]] double row_mass(int i) const { return to_double(row_mass_wide(i)); }

    [[nodiscard]] wide_real row_mass_wide(int i) const {
        const auto& row = boundary_wide[static_cast<std::size_t>(i)];
        wide_real s = 0;
        for (std::size_t k = 0; k + 1 < row.size(); ++k)  // j <= c-1
            s += row[k];
        return s + pole_value(coeff[static_cast<std::size_t>(i)], roots.nodes, 1);
    }
};

inline MomentTable factorial_moments(const GfSolution& sol, int n_max);

/// Full solve: row 0, then for each i the cut equation, the row recursion and
/// the tail expansion, in the order (0,0) -> ... -> (0,c) -> (1,1) -> ... -> (c,c).
/// Everything is computed relative to pi_{0,0} = 1 and rescaled at the end.
/// The result is certified against the balance equations up to level c + 10.
inline GfSolution solve_gf(const ValidatedParams& p, const GfOptions& options = {}) {
    const int c = p.c();
    const auto n = static_cast<std::size_t>(c) + 1;
    GfSolution sol;
    sol.params = p.raw();
    sol.roots = characteristic_roots(p);
    if (!options.merge_confluent_poles)
        require_distinct_poles(sol.roots);
    auto& bw = sol.boundary_wide;
    bw.resize(n);
    sol.coeff.resize(n);
    sol.ab.resize(n);

    const RowZero r0 = row_zero(p);
    bw[0].assign(r0.ratios.begin(), r0.ratios.end());
    bw[0].push_back(r0.ratios.back() * r0.tail_ratio);
    sol.coeff[0].resize(sol.roots.nodes.size());
    sol.coeff[0][static_cast<std::size_t>(sol.roots.node_of[0])] = {r0.ratios.back()};  // T_0 = pi_{0,c-1}/(zhat_0 - z)

    for (int i = 1; i <= c; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const wide_real pi_ii = cut_equation(p, sol.roots, i - 1, bw[ii - 1], sol.coeff[ii - 1]);
        if (i < c) {
            RowRecursion rr = row_recursion(p, sol.roots, i, pi_ii, bw[ii - 1], sol.coeff[ii - 1]);
            bw[ii] = std::move(rr.row);
            sol.ab[ii] = std::move(rr.coeffs);
            sol.coeff[ii] = pole_coefficients(p, sol.roots, i, sol.coeff[ii - 1],
                                              bw[ii][static_cast<std::size_t>(c - 1 - i)]);
        } else {
            bw[ii] = {pi_ii};
            sol.coeff[ii] = pole_coefficients(p, sol.roots, i, sol.coeff[ii - 1], 0);
        }
    }

    wide_real total = 0;
    for (int i = 0; i <= c; ++i)
        total += sol.row_mass_wide(i);
    if (!(total > 0) || !(to_double(total) < std::numeric_limits<double>::infinity()))
        throw Error(ErrorCode::NumericalBreakdown, "normalization constant is not finite");
    const wide_real scale = 1 / total;
    for (auto& row : bw)
        for (auto& v : row)
            v *= scale;
    for (auto& row : sol.coeff)
        for (auto& node : row)
            for (auto& v : node)
                v *= scale;
    for (auto& rc : sol.ab)
        for (auto& v : rc.a)
            v *= scale;
    sol.pi00 = to_double(scale);
    sol.boundary.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sol.boundary[i].resize(bw[i].size());
        for (std::size_t k = 0; k < bw[i].size(); ++k)
            sol.boundary[i][k] = to_double(bw[i][k]);
    }

    const BalanceCheck check = balance_residual(sol.distribution(), p, c + 10);
    sol.balance_certificate = check.max_relative;
    if (options.certify && (check.negative_mass || !(check.max_relative <= options.certificate_tolerance)))
        throw Error(ErrorCode::NumericalBreakdown,
                    "generating-function solution fails its balance certificate (relative residual " +
                        std::to_string(check.max_relative) + " at (" + std::to_string(check.worst.i) + ", " +
                        std::to_string(check.worst.j) +
                        ")); the pole expansion lost precision, use the matrix-analytic solver");
    sol.moments = factorial_moments(sol, options.moment_order);
    return sol;
}

inline MomentTable factorial_moments(const GfSolution& sol, int n_max) {
    const QueueParams& p = sol.params;
    const int c = p.c;
    const wide_real lambda = p.lambda;
    const wide_real alpha = p.alpha;
    const wide_real mu = p.mu;
    const auto n = static_cast<std::size_t>(c) + 1;
    std::vector<std::vector<wide_real>> hat(n);
    auto pi = [&](int i, int j) {
        return sol.boundary_wide[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)];
    };
    auto tail_at_one = [&](int i) { return pole_value(sol.coeff[static_cast<std::size_t>(i)], sol.roots.nodes, 1); };

    // Row 0: (lambda + c alpha - lambda z) Pihat_0(z) = lambda pi_{0,c-1} z^c.
    {
        auto& h = hat[0];
        h.resize(static_cast<std::size_t>(n_max) + 2);
        h[0] = tail_at_one(0);
        for (int k = 1; k <= n_max + 1; ++k)
            h[static_cast<std::size_t>(k)] =
                (k * lambda * h[static_cast<std::size_t>(k - 1)] +
                 lambda * pi(0, c - 1) * falling_factorial<wide_real>(c, k)) /
                (c * alpha);
    }

    // Rows 1..c-1: k-th derivative at z = 1 of
    //   f_i(z) Pihat_i(z) = (c-i+1) alpha Pihat_{i-1}(z) + lambda pi_{i,c-1} z^{c-i+1} - i mu pi_{i,c} z^{c-i}
    // using f_i(1) = (c-i) alpha, f_i'(1) = i mu + (c-i) alpha - lambda, f_i'' = -2 lambda.
    for (int i = 1; i < c; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const wide_real serve = i * mu;
        const wide_real f1 = (c - i) * alpha;
        const wide_real df1 = serve + (c - i) * alpha - lambda;
        auto& h = hat[ii];
        const auto& up = hat[ii - 1];
        h.resize(static_cast<std::size_t>(n_max) + 2);
        h[0] = tail_at_one(i);
        for (int k = 1; k <= n_max + 1; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            wide_real rhs = (c - i + 1) * alpha * up[kk] - k * df1 * h[kk - 1] +
                            lambda * pi(i, c - 1) * falling_factorial<wide_real>(c - i + 1, k) -
                            serve * pi(i, c) * falling_factorial<wide_real>(c - i, k);
            if (k >= 2)
                rhs += k * (k - 1) * lambda * h[kk - 2];
            h[kk] = rhs / f1;
        }
    }

    // Row c: f_c(z) Pihat_c(z) = alpha Pihat_{c-1}(z) - c mu pi_{c,c}, f_c(1) = 0,
    // so differentiate k+1 times: (k+1)(c mu - lambda) P^(k) = alpha Pihat_{c-1}^{(k+1)} + lambda k (k+1) P^(k-1).
    {
        const wide_real drift = c * mu - lambda;
        auto& h = hat[static_cast<std::size_t>(c)];
        const auto& up = hat[static_cast<std::size_t>(c - 1)];
        h.resize(static_cast<std::size_t>(n_max) + 1);
        for (int k = 0; k <= n_max; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            wide_real rhs = alpha * up[kk + 1];
            if (k >= 1)
                rhs += lambda * k * (k + 1) * h[kk - 1];
            h[kk] = rhs / ((k + 1) * drift);
        }
    }

    MomentTable m;
    m.n_max = n_max;
    m.hat.resize(n);
    m.full.resize(n);
    for (int i = 0; i <= c; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        for (const auto& v : hat[ii])
            m.hat[ii].push_back(to_double(v));
        auto& f = m.full[ii];
        f.resize(static_cast<std::size_t>(n_max) + 1);
        for (int k = 0; k <= n_max; ++k) {
            wide_real s = hat[ii][static_cast<std::size_t>(k)];
            for (int j = i; j <= c - 1; ++j)
                s += pi(i, j) * falling_factorial<wide_real>(j - i, k);
            f[static_cast<std::size_t>(k)] = to_double(s);
        }
    }
    return m;
}

}  // namespace mmcsetup
