#pragma once

// Reference solution: the generator is assembled state by state from
// transition_rates on {(i,j) : j <= j_max} and the global balance equations are
// solved with a sparse direct method. Nothing here depends on the analytic
// solvers.

#include "mmcsetup/core_model.hpp"
#include "mmcsetup/errors.hpp"
#include "mmcsetup/joint_distribution.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mmcsetup {

/// Index map over the truncated state space, ordered by level then phase.
class TruncatedCtmc {
public:
    TruncatedCtmc(const ValidatedParams& p, int j_max) : params_(p), c_(p.c()), j_max_(j_max) {
        if (j_max < c_ + 5)
            throw Error(ErrorCode::InvalidParameter, "j_max must be at least c + 5");
        offsets_.resize(static_cast<std::size_t>(j_max) + 2);
        offsets_[0] = 0;
        for (int j = 0; j <= j_max; ++j)
            offsets_[static_cast<std::size_t>(j) + 1] = offsets_[static_cast<std::size_t>(j)] + std::min(j, c_) + 1;
    }

    [[nodiscard]] int j_max() const noexcept { return j_max_; }
    [[nodiscard]] int size() const noexcept { return offsets_.back(); }
    [[nodiscard]] int index(const State& s) const {
        return offsets_[static_cast<std::size_t>(s.j)] + s.i;
    }

    /// Generator with arrivals out of the top level removed (reflecting closure).
    [[nodiscard]] Eigen::SparseMatrix<double> generator() const {
        std::vector<Eigen::Triplet<double>> entries;
        entries.reserve(static_cast<std::size_t>(size()) * 4);
        for_each_state([&](const State& s) {
            const int from = index(s);
            double out = 0.0;
            for (const auto& t : transition_rates(s, params_)) {
                if (t.to.j > j_max_)
                    continue;
                entries.emplace_back(from, index(t.to), t.rate);
                out += t.rate;
            }
            entries.emplace_back(from, from, -out);
        });
        Eigen::SparseMatrix<double> q(size(), size());
        q.setFromTriplets(entries.begin(), entries.end());
        return q;
    }

    template <typename F>
    void for_each_state(F&& f) const {
        for (int j = 0; j <= j_max_; ++j)
            for (int i = 0; i <= std::min(j, c_); ++i)
                f(State{i, j});
    }

private:
    ValidatedParams params_;
    int c_;
    int j_max_;
    std::vector<int> offsets_;
};

struct OracleSolution {
    JointDistribution distribution;
    int j_max = 0;
    double truncation_mass = 0.0;  ///< mass at levels >= j_max - 2
    double balance_residual = 0.0; ///< ||pi Q||_inf on the truncated chain
};

inline OracleSolution solve_truncated(const ValidatedParams& p, int j_max, double tol = 1e-10) {
    const TruncatedCtmc chain(p, j_max);
    const Eigen::SparseMatrix<double> q = chain.generator();
    const int n = chain.size();

    // pi Q = 0 with pi_{0,0} pinned to 1; normalized afterwards. Pinning keeps
    // the system sparse, unlike a dense normalization row.
    Eigen::SparseMatrix<double> a = q.transpose();
    a.prune([](Eigen::Index row, Eigen::Index, double) { return row != 0; });
    a.insert(0, 0) = 1.0;
    a.makeCompressed();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(0) = 1.0;

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw Error(ErrorCode::SingularMatrix, "sparse factorization of the truncated chain failed");
    Eigen::VectorXd pi = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !pi.allFinite())
        throw Error(ErrorCode::SingularMatrix, "sparse solve of the truncated chain failed");
    pi /= pi.sum();

    const Eigen::VectorXd residual = q.transpose() * pi;

    const int c = p.c();
    std::vector<std::vector<double>> boundary(static_cast<std::size_t>(c) + 1);
    std::vector<std::vector<double>> tail;
    double truncation_mass = 0.0;
    chain.for_each_state([&](const State& s) {
        const double v = pi(chain.index(s));
        if (s.j >= j_max - 2)
            truncation_mass += v;
        if (s.j <= c) {
            boundary[static_cast<std::size_t>(s.i)].push_back(v);
        } else {
            if (s.i == 0)
                tail.emplace_back(static_cast<std::size_t>(c) + 1, 0.0);
            tail.back()[static_cast<std::size_t>(s.i)] = v;
        }
    });
    if (truncation_mass > tol)
        throw Error(ErrorCode::TruncationInsufficient,
                    "mass " + std::to_string(truncation_mass) + " near level " + std::to_string(j_max) +
                        " exceeds tolerance");
    return {JointDistribution(c, std::move(boundary), ExplicitTail{std::move(tail)}), j_max,
            truncation_mass, residual.lpNorm<Eigen::Infinity>()};
}

/// Smallest level count k with eta^k / (1 - eta) < tol, doubled, where eta is
/// the slowest per-level decay of the stationary tail. Besides rho this
/// includes the all-OFF decay lambda/(lambda + c alpha) and the per-phase decays
/// of partially active rows, since slow setups make those dominate.
inline int choose_truncation(const ValidatedParams& p, double tol) {
    const int c = p.c();
    const double lambda = p.lambda();
    double eta = std::max(p.rho(), lambda / (lambda + c * p.alpha()));
    for (int i = 1; i < c; ++i) {
        const double b = lambda + i * p.mu() + (c - i) * p.alpha();
        eta = std::max(eta, 2.0 * lambda / (b + std::sqrt(b * b - 4.0 * i * lambda * p.mu())));
    }
    int k = 1;
    while (std::pow(eta, k) / (1.0 - eta) >= tol)
        ++k;
    return std::max(c + 5, c + 2 * k);
}

}  // namespace mmcsetup
