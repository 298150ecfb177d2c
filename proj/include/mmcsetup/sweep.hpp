#pragma once

#include "mmcsetup/core_model.hpp"
#include "mmcsetup/ctmc_oracle.hpp"
#include "mmcsetup/des_sim.hpp"
#include "mmcsetup/errors.hpp"
#include "mmcsetup/gf_solver.hpp"
#include "mmcsetup/measures.hpp"
#include "mmcsetup/qbd_solver.hpp"
#include "mmcsetup/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace mmcsetup {

enum class Method { Gf, Qbd, Oracle, Sim };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::Gf: return "gf";
    case Method::Qbd: return "qbd";
    case Method::Oracle: return "oracle";
    case Method::Sim: return "sim";
    }
    return "?";
}

/// "gf", "qbd", "oracle", "sim" or "all" (the three analytic methods).
inline std::vector<Method> parse_methods(const std::string& s) {
    if (s == "all")
        return {Method::Gf, Method::Qbd, Method::Oracle};
    if (s == "gf")
        return {Method::Gf};
    if (s == "qbd")
        return {Method::Qbd};
    if (s == "oracle")
        return {Method::Oracle};
    if (s == "sim")
        return {Method::Sim};
    throw Error(ErrorCode::InvalidConfig, "unknown method '" + s + "'");
}

/// Truncated-chain solve with the level cut chosen for 1e-11 tail mass.
inline OracleSolution oracle_solve(const ValidatedParams& p) {
    return solve_truncated(p, choose_truncation(p, 1e-11), 1e-9);
}

/// Joint pmf from one analytic method. Throws for Method::Sim.
inline JointDistribution solve_distribution(const ValidatedParams& p, Method m) {
    switch (m) {
    case Method::Gf: return solve_gf(p).distribution();
    case Method::Qbd: return stationary(p).distribution();
    case Method::Oracle: return oracle_solve(p).distribution;
    case Method::Sim: break;
    }
    throw Error(ErrorCode::InvalidConfig, "simulation has no joint distribution");
}

/// Largest disagreement between two solutions: absolute on pi_{i,j} for
/// j <= c + 50, relative (to max(1, |x|)) on the report scalars.
inline double discrepancy(const JointDistribution& a, const PerformanceReport& ra, const JointDistribution& b,
                          const PerformanceReport& rb) {
    const int c = a.servers();
    double worst = 0.0;
    for (int j = 0; j <= c + 50; ++j) {
        const auto la = a.level(j);
        const auto lb = b.level(j);
        for (std::size_t i = 0; i < la.size(); ++i)
            worst = std::max(worst, std::abs(la[i] - lb[i]));
    }
    auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(x)); };
    worst = std::max({worst, rel(ra.e_active, rb.e_active), rel(ra.e_setup, rb.e_setup),
                      rel(ra.e_jobs, rb.e_jobs), rel(ra.switching_rate, rb.switching_rate)});
    return worst;
}

inline constexpr double method_agreement_tolerance = 1e-9;

enum class SweepVariable { Alpha, Rho, Servers, CostRatio };

inline std::string to_string(SweepVariable v) {
    switch (v) {
    case SweepVariable::Alpha: return "alpha";
    case SweepVariable::Rho: return "rho";
    case SweepVariable::Servers: return "c";
    case SweepVariable::CostRatio: return "cost_ratio";
    }
    return "?";
}

inline SweepVariable parse_sweep_variable(const std::string& s) {
    if (s == "alpha")
        return SweepVariable::Alpha;
    if (s == "rho")
        return SweepVariable::Rho;
    if (s == "c")
        return SweepVariable::Servers;
    if (s == "cost_ratio" || s == "r")
        return SweepVariable::CostRatio;
    throw Error(ErrorCode::InvalidConfig, "unknown sweep variable '" + s + "'");
}

struct SweepSpec {
    SweepVariable variable = SweepVariable::Alpha;
    std::vector<double> grid;
    double rho = 0.5;  ///< fixed traffic intensity; lambda = rho c mu
    double mu = 1.0;
    double alpha = 1.0;
    int c = 20;
    CostParams costs;
    std::vector<Method> methods{Method::Qbd};
    std::uint64_t seed = 1;
    std::int64_t sim_events = 1'000'000;
    unsigned threads = 0;  ///< 0: hardware concurrency

    /// Parameters and costs at grid point k.
    [[nodiscard]] std::pair<QueueParams, CostParams> point(std::size_t k) const {
        double r = rho, a = alpha;
        int servers = c;
        CostParams cost = costs;
        const double x = grid[k];
        switch (variable) {
        case SweepVariable::Alpha: a = x; break;
        case SweepVariable::Rho: r = x; break;
        case SweepVariable::Servers: servers = static_cast<int>(std::lround(x)); break;
        case SweepVariable::CostRatio: cost.c_setup = x * cost.c_active; break;
        }
        return {QueueParams::from_rho(r, mu, a, servers), cost};
    }

    void check() const {
        if (grid.empty())
            throw Error(ErrorCode::InvalidConfig, "sweep grid is empty");
        for (std::size_t k = 1; k < grid.size(); ++k)
            if (!(grid[k] > grid[k - 1]))
                throw Error(ErrorCode::InvalidConfig, "sweep grid must be strictly increasing");
        if (methods.empty())
            throw Error(ErrorCode::InvalidConfig, "no method selected");
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto [p, cost] = point(k);
            if (variable == SweepVariable::Servers && std::abs(grid[k] - p.c) > 1e-9)
                throw Error(ErrorCode::InvalidConfig, "server counts must be integers");
            validate(p);
            cost.check();
        }
    }
};

struct SweepRow {
    std::size_t index = 0;
    double value = 0.0;
    QueueParams params;
    CostParams costs;
    std::optional<PerformanceReport> report;  ///< from the first analytic method that succeeded
    std::string method;                       ///< which one
    std::optional<double> max_discrepancy;    ///< across analytic methods, when more than one ran
    std::optional<SimEstimate> sim;
    std::optional<bool> sim_pass;
    std::string error;  ///< empty when every method succeeded and agreed
};

inline SweepRow run_point(const SweepSpec& spec, std::size_t k) {
    SweepRow row;
    row.index = k;
    row.value = spec.grid[k];
    std::tie(row.params, row.costs) = spec.point(k);
    auto note = [&](const std::string& msg) {
        if (!row.error.empty())
            row.error += "; ";
        row.error += msg;
    };
    std::optional<ValidatedParams> p;
    try {
        p = validate(row.params);
    } catch (const Error& e) {
        note(e.what());
        return row;
    }
    std::vector<std::pair<JointDistribution, PerformanceReport>> solved;
    for (Method m : spec.methods) {
        if (m == Method::Sim)
            continue;
        try {
            JointDistribution d = solve_distribution(*p, m);
            PerformanceReport r = evaluate(d, *p, row.costs);
            if (!row.report) {
                row.report = r;
                row.method = to_string(m);
            }
            solved.emplace_back(std::move(d), std::move(r));
        } catch (const Error& e) {
            note(to_string(m) + ": " + e.what());
        }
    }
    if (solved.size() > 1) {
        double worst = 0.0;
        for (std::size_t a = 1; a < solved.size(); ++a)
            worst = std::max(worst, discrepancy(solved[0].first, solved[0].second, solved[a].first,
                                                solved[a].second));
        row.max_discrepancy = worst;
        if (worst > method_agreement_tolerance)
            note("methods disagree by " + csv_number(worst));
    }
    if (std::find(spec.methods.begin(), spec.methods.end(), Method::Sim) != spec.methods.end()) {
        try {
            SimConfig cfg;
            cfg.params = row.params;
            cfg.events = spec.sim_events;
            cfg.seed = spec.seed + k;
            row.sim = simulate(cfg);
            if (row.report)
                row.sim_pass = validate_against(*row.report, *row.sim).all_pass();
        } catch (const Error& e) {
            note(std::string("sim: ") + e.what());
        }
    }
    return row;
}

/// Evaluates every grid point, several at a time; rows come back in grid order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.check();
    const std::size_t n = spec.grid.size();
    const unsigned hw = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<SweepRow> rows(n);
    for (std::size_t start = 0; start < n; start += hw) {
        std::vector<std::future<SweepRow>> batch;
        for (std::size_t k = start; k < std::min(n, start + hw); ++k)
            batch.push_back(std::async(std::launch::async, run_point, std::cref(spec), k));
        for (std::size_t k = 0; k < batch.size(); ++k)
            rows[start + k] = batch[k].get();
    }
    return rows;
}

inline std::vector<std::string> sweep_csv_header() {
    std::vector<std::string> h{"index", "variable", "value", "lambda", "mu", "alpha", "c", "rho",
                               "c_active", "c_setup", "c_idle", "c_switch", "method"};
    for (auto& f : report_csv_header())
        h.push_back(f);
    for (const char* f : {"max_discrepancy", "sim_e_jobs", "sim_e_jobs_hw", "sim_pass", "error"})
        h.emplace_back(f);
    return h;
}

/// Writes the column documentation, the header line and one line per row.
inline void write_sweep_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    os << "# sweep over " << to_string(spec.variable)
       << "; cost_onoff = C_a E[A] + C_s E[S]; total_cost_onoff adds C_sw E[S_r];"
          " cost_onidle and e_jobs_onidle are the M/M/c baseline; max_discrepancy compares"
          " analytic methods; error is empty on success\n";
    os << csv_row(sweep_csv_header()) << '\n';
    for (const auto& r : rows) {
        std::vector<std::string> f{std::to_string(r.index),     to_string(spec.variable),
                                   csv_number(r.value),         csv_number(r.params.lambda),
                                   csv_number(r.params.mu),     csv_number(r.params.alpha),
                                   std::to_string(r.params.c),  csv_number(r.params.rho()),
                                   csv_number(r.costs.c_active), csv_number(r.costs.c_setup),
                                   csv_number(r.costs.c_idle),  csv_number(r.costs.c_switch),
                                   r.method};
        if (r.report) {
            for (auto& x : report_csv_fields(*r.report))
                f.push_back(x);
        } else {
            f.resize(f.size() + report_csv_header().size());
        }
        f.push_back(r.max_discrepancy ? csv_number(*r.max_discrepancy) : "");
        f.push_back(r.sim ? csv_number(r.sim->e_jobs.mean) : "");
        f.push_back(r.sim ? csv_number(r.sim->e_jobs.half_width) : "");
        f.push_back(r.sim_pass ? (*r.sim_pass ? "1" : "0") : "");
        f.push_back(r.error);
        os << csv_row(f) << '\n';
    }
}

enum class CostCurve { OnOff, Total };

/// cost_onoff(alpha) - cost_onidle, or the same with the switching cost added.
inline double cost_gap(QueueParams params, const CostParams& costs, double alpha, CostCurve curve,
                       Method method = Method::Qbd) {
    params.alpha = alpha;
    const ValidatedParams p = validate(params);
    const PerformanceReport r = evaluate(solve_distribution(p, method), p, costs);
    return (curve == CostCurve::OnOff ? r.cost_onoff : r.total_cost_onoff) - r.cost_onidle;
}

struct Crossover {
    double alpha = 0.0;
    double gap = 0.0;  ///< cost gap at the returned alpha
    int evaluations = 0;
};

/// Bisection in log(alpha) on the cost gap until hi / lo - 1 <= rel_width.
inline Crossover crossover_finder(const QueueParams& params, const CostParams& costs, double lo = 1e-4,
                                  double hi = 1e3, CostCurve curve = CostCurve::OnOff,
                                  double rel_width = 1e-6, Method method = Method::Qbd) {
    if (!(lo > 0.0 && hi > lo))
        throw Error(ErrorCode::InvalidConfig, "crossover interval must satisfy 0 < lo < hi");
    Crossover out;
    double g_lo = cost_gap(params, costs, lo, curve, method);
    const double g_hi = cost_gap(params, costs, hi, curve, method);
    out.evaluations = 2;
    if ((g_lo > 0.0) == (g_hi > 0.0))
        throw Error(ErrorCode::NoCrossing, "cost gap has the same sign at alpha = " + csv_number(lo) +
                                               " and alpha = " + csv_number(hi));
    while (hi / lo - 1.0 > rel_width) {
        const double mid = std::sqrt(lo * hi);
        const double g = cost_gap(params, costs, mid, curve, method);
        ++out.evaluations;
        if ((g > 0.0) == (g_lo > 0.0)) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    out.alpha = std::sqrt(lo * hi);
    out.gap = cost_gap(params, costs, out.alpha, curve, method);
    ++out.evaluations;
    return out;
}

/// Every sign change of the cost gap on a log-spaced scan of [lo, hi], each
/// refined by `crossover_finder`. Empty when the curves never cross.
inline std::vector<Crossover> find_crossings(const QueueParams& params, const CostParams& costs, double lo,
                                             double hi, CostCurve curve, int scan_points = 41,
                                             Method method = Method::Qbd) {
    std::vector<double> alphas(static_cast<std::size_t>(scan_points));
    std::vector<double> gaps(alphas.size());
    for (int k = 0; k < scan_points; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        alphas[kk] = lo * std::pow(hi / lo, static_cast<double>(k) / (scan_points - 1));
        gaps[kk] = cost_gap(params, costs, alphas[kk], curve, method);
    }
    std::vector<Crossover> out;
    for (std::size_t k = 1; k < alphas.size(); ++k)
        if ((gaps[k - 1] > 0.0) != (gaps[k] > 0.0))
            out.push_back(crossover_finder(params, costs, alphas[k - 1], alphas[k], curve, 1e-6, method));
    return out;
}

}  // namespace mmcsetup
