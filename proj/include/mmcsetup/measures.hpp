#pragma once

#include "mmcsetup/core_model.hpp"
#include "mmcsetup/errors.hpp"
#include "mmcsetup/joint_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mmcsetup {

struct PerformanceReport {
    double e_active = 0.0;        ///< E[A]
    double e_setup = 0.0;         ///< E[S]
    double switching_rate = 0.0;  ///< E[S_r]
    double e_jobs = 0.0;          ///< E[L]
    std::vector<double> marginal; ///< P(C = i)
    double cost_onoff = 0.0;
    double cost_onidle = 0.0;
    double total_cost_onoff = 0.0;
    double e_jobs_onidle = 0.0;   ///< E[L] of the setup-free M/M/c
};

/// Mean number of servers in setup, sum min(j-i, c-i) pi_{i,j}; every tail
/// state of row i has c-i setups.
inline double mean_in_setup(const JointDistribution& d) {
    const int c = d.servers();
    double s = 0.0;
    for (int i = 0; i <= c; ++i) {
        const auto& row = d.boundary()[static_cast<std::size_t>(i)];
        for (int j = i; j <= c; ++j)
            s += std::min(j - i, c - i) * row[static_cast<std::size_t>(j - i)];
        s += (c - i) * d.row_tail_mass(i, 1);
    }
    return s;
}

/// E[A], E[S], E[L] and the server marginal. Switching rate and costs are
/// filled by `switching_rate` and `costs`.
inline PerformanceReport performance(const JointDistribution& d, const ValidatedParams& p) {
    const int c = p.c();
    PerformanceReport r;
    r.marginal = d.server_marginal();
    for (int i = 0; i <= c; ++i)
        r.e_active += i * r.marginal[static_cast<std::size_t>(i)];
    r.e_setup = mean_in_setup(d);
    for (int i = 0; i <= c; ++i) {
        const auto& row = d.boundary()[static_cast<std::size_t>(i)];
        for (int j = i; j <= c; ++j)
            r.e_jobs += j * row[static_cast<std::size_t>(j - i)];
        r.e_jobs += c * d.row_tail_mass(i, 1) + d.row_tail_first_moment(i);
    }
    return r;
}

struct SwitchingBalance {
    double off_to_on = 0.0;  ///< setup completions: alpha sum_{i<c} sum_j min(c-i, j-i) pi_{i,j}
    double on_to_off = 0.0;  ///< sum_i i mu pi_{i,i}
};

inline SwitchingBalance switching_sides(const JointDistribution& d, const ValidatedParams& p) {
    SwitchingBalance s;
    s.off_to_on = p.alpha() * mean_in_setup(d);
    for (int i = 1; i <= p.c(); ++i)
        s.on_to_off += i * p.mu() * d.prob(i, i);
    return s;
}

/// E[S_r] = sum_i i mu pi_{i,i}, cross-checked against the OFF -> ON rate.
inline double switching_rate(const JointDistribution& d, const ValidatedParams& p, double tol = 1e-10) {
    const SwitchingBalance s = switching_sides(d, p);
    const double scale = std::max({1.0, s.off_to_on, s.on_to_off});
    if (!(std::abs(s.off_to_on - s.on_to_off) <= tol * scale))
        throw Error(ErrorCode::InternalInconsistency,
                    "switching rates disagree: OFF->ON " + std::to_string(s.off_to_on) + " vs ON->OFF " +
                        std::to_string(s.on_to_off));
    return s.on_to_off;
}

struct CostFields {
    double cost_onoff = 0.0;        ///< C_a E[A] + C_s E[S]
    double cost_onidle = 0.0;       ///< c rho C_a + c (1 - rho) C_i
    double total_cost_onoff = 0.0;  ///< cost_onoff + C_sw E[S_r]
};

inline CostFields costs(const PerformanceReport& r, const CostParams& k, const ValidatedParams& p) {
    k.check();
    CostFields out;
    out.cost_onoff = k.c_active * r.e_active + k.c_setup * r.e_setup;
    out.cost_onidle = mmc_baseline(p, k).cost;
    out.total_cost_onoff = out.cost_onoff + k.c_switch * r.switching_rate;
    return out;
}

/// Everything at once: performance, switching rate, costs and the ON-IDLE mean.
inline PerformanceReport evaluate(const JointDistribution& d, const ValidatedParams& p, const CostParams& k) {
    PerformanceReport r = performance(d, p);
    r.switching_rate = switching_rate(d, p);
    const CostFields f = costs(r, k, p);
    r.cost_onoff = f.cost_onoff;
    r.cost_onidle = f.cost_onidle;
    r.total_cost_onoff = f.total_cost_onoff;
    r.e_jobs_onidle = mmc_baseline(p, k).mean_jobs;
    return r;
}

/// P(N = n) for n = 0..n_max.
inline std::vector<double> job_count_pmf(const JointDistribution& d, int n_max) {
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n)
        out[static_cast<std::size_t>(n)] = d.level_mass(n);
    return out;
}

/// Conditional decomposition of the queue length when all servers are busy:
/// Q^(c) equals in law Q^(c)_ON-IDLE + Q_Res with independent terms.
struct DecompositionReport {
    std::vector<double> dist_qc;      ///< pi_{c,c+m} / Pi_c(1)
    std::vector<double> dist_onidle;  ///< (1 - rho) rho^m
    std::vector<double> dist_res;     ///< sum_{k>=m} pi_{c-1,c+k} / Pi'_{c-1}(1)
    std::vector<double> convolution;  ///< dist_onidle * dist_res
    double tv_gap = 0.0;              ///< total variation between dist_qc and convolution
    double truncated_mass = 0.0;      ///< largest mass left beyond the support
};

inline DecompositionReport decomposition(const JointDistribution& d, const ValidatedParams& p,
                                         double residual = 1e-12, int max_support = 1'000'000) {
    const int c = p.c();
    const double rho = p.rho();
    const double mass_c = d.row_mass(c);
    // Pi_{c-1}(z) = sum_{j>=c-1} pi_{c-1,j} z^{j-c+1}; its derivative at 1 weights
    // pi_{c-1,c+k} by k+1.
    const double head = d.prob(c - 1, c);
    const double tail0 = head + d.row_tail_mass(c - 1, 1);
    const double slope = tail0 + d.row_tail_first_moment(c - 1);
    if (!(slope > 0.0) || !(mass_c > 0.0))
        throw Error(ErrorCode::DegenerateCondition, "conditioning event has zero probability");

    DecompositionReport out;
    // Compensated running sums: the stopping rule compares 1 - sum against 1e-12.
    struct Kahan {
        double sum = 0.0, carry = 0.0;
        void add(double x) {
            const double y = x - carry;
            const double t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        [[nodiscard]] double left() const { return (1.0 - sum) + carry; }
    } qc_sum, idle_sum, res_sum;
    double res_tail = tail0;  // sum_{k>=m} pi_{c-1,c+k}
    const int chunk = 256;
    int m = 0;
    while (m < max_support) {
        const auto row_c = d.row_values(c, c + m, c + m + chunk - 1);
        const auto row_prev = d.row_values(c - 1, c + m, c + m + chunk - 1);
        for (int k = 0; k < chunk; ++k, ++m) {
            const double qc = row_c[static_cast<std::size_t>(k)] / mass_c;
            const double idle = (1.0 - rho) * std::pow(rho, m);
            const double res = res_tail / slope;
            out.dist_qc.push_back(qc);
            out.dist_onidle.push_back(idle);
            out.dist_res.push_back(res);
            qc_sum.add(qc);
            idle_sum.add(idle);
            res_sum.add(res);
            res_tail -= row_prev[static_cast<std::size_t>(k)];
        }
        if (std::max({qc_sum.left(), idle_sum.left(), res_sum.left()}) < residual)
            break;
    }
    // The ON-IDLE factor is geometric, so conv_m = rho conv_{m-1} + (1 - rho) res_m.
    const std::size_t n = out.dist_qc.size();
    out.convolution.assign(n, 0.0);
    Kahan conv_sum;
    double gap = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        out.convolution[k] = (k > 0 ? rho * out.convolution[k - 1] : 0.0) + (1.0 - rho) * out.dist_res[k];
        conv_sum.add(out.convolution[k]);
        gap += std::abs(out.dist_qc[k] - out.convolution[k]);
    }
    const double qc_rest = std::max(qc_sum.left(), 0.0);
    const double conv_rest = std::max(conv_sum.left(), 0.0);
    out.tv_gap = 0.5 * (gap + qc_rest + conv_rest);
    out.truncated_mass = std::max({qc_rest, conv_rest, res_sum.left(), idle_sum.left()});
    return out;
}

}  // namespace mmcsetup
