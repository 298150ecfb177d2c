// Command-line front end: solve, sweep, crossover, simulate, validate.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 unstable
// parameters, 3 numerical failure, 4 simulation disagrees with the analytic
// solution (validate only).

#include "mmcsetup/mmcsetup.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace mmcsetup;

struct Common {
    std::optional<double> lambda;
    std::optional<double> rho;
    double mu = 1.0;
    double alpha = 1.0;
    int c = 1;
    CostParams costs;
    std::string method = "qbd";
    std::string out;
    std::uint64_t seed = 1;

    [[nodiscard]] QueueParams params() const {
        if (rho)
            return QueueParams::from_rho(*rho, mu, alpha, c);
        return QueueParams{lambda.value_or(1.0), mu, alpha, c};
    }
};

int exit_code(const Error& e) {
    switch (e.code()) {
    case ErrorCode::Unstable: return 2;
    case ErrorCode::InvalidParameter:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidState: return 1;
    default: return 3;
    }
}

/// Writes to --out when given, stdout otherwise.
void emit(const Common& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(opt.out);
    if (!f)
        throw Error(ErrorCode::InvalidConfig, "cannot open " + opt.out);
    f << text;
}

int run_solve(const Common& opt, bool with_decomposition) {
    const ValidatedParams p = validate(opt.params());
    opt.costs.check();
    const auto methods = parse_methods(opt.method);
    Json out{{"params", to_json(p.raw())}, {"costs", to_json(opt.costs)}, {"method", opt.method}};

    std::vector<std::pair<JointDistribution, PerformanceReport>> solved;
    Json solutions = Json::object();
    for (Method m : methods) {
        if (m == Method::Sim)
            throw Error(ErrorCode::InvalidConfig, "use the simulate subcommand for simulation");
        switch (m) {
        case Method::Gf: {
            GfSolution s = solve_gf(p);
            solutions["gf"] = to_json(s);
            solved.emplace_back(s.distribution(), PerformanceReport{});
            break;
        }
        case Method::Qbd: {
            QbdSolution s = stationary(p);
            solutions["qbd"] = to_json(s);
            solved.emplace_back(s.distribution(), PerformanceReport{});
            break;
        }
        default: {
            OracleSolution s = oracle_solve(p);
            solutions["oracle"] = Json{{"method", "oracle"},
                                       {"j_max", s.j_max},
                                       {"truncation_mass", s.truncation_mass},
                                       {"balance_residual", s.balance_residual},
                                       {"boundary", boundary_json(s.distribution)}};
            solved.emplace_back(std::move(s.distribution), PerformanceReport{});
            break;
        }
        }
        solved.back().second = evaluate(solved.back().first, p, opt.costs);
    }
    out["report"] = to_json(solved.front().second);
    if (solved.size() > 1) {
        double worst = 0.0;
        for (std::size_t k = 1; k < solved.size(); ++k)
            worst = std::max(worst, discrepancy(solved[0].first, solved[0].second, solved[k].first,
                                                solved[k].second));
        out["max_discrepancy"] = worst;
    }
    if (with_decomposition) {
        const DecompositionReport d = decomposition(solved.front().first, p);
        out["decomposition"] = Json{{"support", d.dist_qc.size()},
                                    {"tv_gap", d.tv_gap},
                                    {"truncated_mass", d.truncated_mass}};
    }
    out["solution"] = std::move(solutions);
    emit(opt, out.dump(2) + "\n");
    return 0;
}

std::vector<double> make_grid(const std::vector<double>& listed, double from, double to, int points,
                              bool log_spaced) {
    if (!listed.empty())
        return listed;
    if (points < 1)
        throw Error(ErrorCode::InvalidConfig, "--points must be positive");
    std::vector<double> g;
    for (int k = 0; k < points; ++k) {
        const double t = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
        g.push_back(log_spaced ? from * std::pow(to / from, t) : from + (to - from) * t);
    }
    return g;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ON-OFF multiserver queue with setup times: solvers, sweeps and simulation"};
    app.set_config("--config", "", "TOML/INI file with option values");
    app.require_subcommand(1);
    app.fallthrough();

    Common opt;
    auto* lambda_opt = app.add_option("--lambda", opt.lambda, "arrival rate");
    auto* rho_opt = app.add_option("--rho", opt.rho, "traffic intensity, sets lambda = rho c mu");
    lambda_opt->excludes(rho_opt);
    app.add_option("--mu", opt.mu, "service rate")->capture_default_str();
    app.add_option("--alpha", opt.alpha, "setup rate")->capture_default_str();
    app.add_option("--c", opt.c, "number of servers")->capture_default_str();
    app.add_option("--ca", opt.costs.c_active, "power of an active server")->capture_default_str();
    app.add_option("--cs", opt.costs.c_setup, "power of a server in setup")->capture_default_str();
    app.add_option("--ci", opt.costs.c_idle, "power of an idle server (ON-IDLE baseline)")->capture_default_str();
    app.add_option("--csw", opt.costs.c_switch, "cost per switch")->capture_default_str();
    app.add_option("--method", opt.method, "gf | qbd | oracle | all (sweep also: sim)")->capture_default_str();
    app.add_option("--out", opt.out, "output file (stdout when omitted)");
    app.add_option("--seed", opt.seed, "random seed")->capture_default_str();

    auto* solve = app.add_subcommand("solve", "stationary distribution and performance report (JSON)");
    bool with_decomposition = false;
    solve->add_flag("--decomposition", with_decomposition, "add the conditional decomposition check");

    auto* sweep = app.add_subcommand("sweep", "one CSV row per grid point");
    std::string variable = "alpha";
    std::vector<double> grid;
    double from = 1e-3, to = 1e2;
    int points = 21;
    bool log_spaced = false;
    unsigned threads = 0;
    std::int64_t sweep_events = 1'000'000;
    sweep->add_option("--var", variable, "alpha | rho | c | cost_ratio")->capture_default_str();
    sweep->add_option("--grid", grid, "explicit grid values")->delimiter(',');
    sweep->add_option("--from", from, "first grid value")->capture_default_str();
    sweep->add_option("--to", to, "last grid value")->capture_default_str();
    sweep->add_option("--points", points, "grid size")->capture_default_str();
    sweep->add_flag("--log", log_spaced, "geometric grid");
    sweep->add_option("--threads", threads, "worker threads (0: all cores)");
    sweep->add_option("--events", sweep_events, "simulation events per point")->capture_default_str();

    auto* cross = app.add_subcommand("crossover", "setup rate where the ON-OFF and ON-IDLE costs meet");
    double lo = 1e-4, hi = 1e3;
    bool total = false, scan = false;
    cross->add_option("--lo", lo, "lower end of the alpha interval")->capture_default_str();
    cross->add_option("--hi", hi, "upper end of the alpha interval")->capture_default_str();
    cross->add_flag("--total", total, "include the switching cost");
    cross->add_flag("--scan", scan, "report every crossing found on a log grid");

    auto* sim = app.add_subcommand("simulate", "event-driven simulation with batch means (JSON)");
    SimConfig sim_cfg;
    std::string trace_path;
    for (auto* sub : {sim, app.add_subcommand("validate", "compare the analytic report with simulation")}) {
        sub->add_option("--events", sim_cfg.events, "total events")->capture_default_str();
        sub->add_option("--warmup", sim_cfg.warmup_fraction, "discarded fraction")->capture_default_str();
        sub->add_option("--batches", sim_cfg.batches, "batch count")->capture_default_str();
    }
    sim->add_option("--trace", trace_path, "write every event as CSV");
    auto* validate_cmd = app.get_subcommand("validate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve)
            return run_solve(opt, with_decomposition);

        if (*sweep) {
            SweepSpec spec;
            spec.variable = parse_sweep_variable(variable);
            spec.grid = make_grid(grid, from, to, points, log_spaced);
            const QueueParams base = opt.params();
            spec.rho = base.rho();
            spec.mu = opt.mu;
            spec.alpha = opt.alpha;
            spec.c = opt.c;
            spec.costs = opt.costs;
            spec.methods = parse_methods(opt.method);
            spec.seed = opt.seed;
            spec.threads = threads;
            spec.sim_events = sweep_events;
            std::ostringstream os;
            write_sweep_csv(os, spec, run_sweep(spec));
            emit(opt, os.str());
            return 0;
        }

        if (*cross) {
            const QueueParams base = opt.params();
            validate(base);
            const CostCurve curve = total ? CostCurve::Total : CostCurve::OnOff;
            const Method m = parse_methods(opt.method).front();
            Json out{{"params", to_json(base)}, {"costs", to_json(opt.costs)}, {"curve", total ? "total" : "onoff"}};
            std::vector<Crossover> found;
            if (scan)
                found = find_crossings(base, opt.costs, lo, hi, curve, 41, m);
            else
                found.push_back(crossover_finder(base, opt.costs, lo, hi, curve, 1e-6, m));
            Json list = Json::array();
            for (const auto& x : found)
                list.push_back(Json{{"alpha", x.alpha}, {"gap", x.gap}, {"evaluations", x.evaluations}});
            out["crossings"] = std::move(list);
            emit(opt, out.dump(2) + "\n");
            return 0;
        }

        sim_cfg.params = opt.params();
        sim_cfg.seed = opt.seed;
        if (*sim) {
            std::unique_ptr<std::ofstream> trace;
            if (!trace_path.empty()) {
                trace = std::make_unique<std::ofstream>(trace_path);
                if (!*trace)
                    throw Error(ErrorCode::InvalidConfig, "cannot open " + trace_path);
            }
            const SimEstimate s = simulate(sim_cfg, trace.get());
            Json out{{"params", to_json(sim_cfg.params)}, {"seed", opt.seed}, {"estimate", to_json(s)}};
            emit(opt, out.dump(2) + "\n");
            return 0;
        }

        if (*validate_cmd) {
            const ValidatedParams p = validate(sim_cfg.params);
            const Method m = parse_methods(opt.method).front();
            const PerformanceReport r = evaluate(solve_distribution(p, m), p, opt.costs);
            const SimEstimate s = simulate(sim_cfg);
            const ValidationReport v = validate_against(r, s);
            Json out{{"params", to_json(p.raw())}, {"method", to_string(m)}, {"seed", opt.seed},
                     {"validation", to_json(v)}};
            emit(opt, out.dump(2) + "\n");
            return v.all_pass() ? 0 : 4;
        }
    } catch (const Error& e) {
        std::cout << error_json(e).dump(2) << "\n";
        std::cerr << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cout << Json{{"error", "Internal"}, {"message", e.what()}}.dump(2) << "\n";
        std::cerr << e.what() << "\n";
        return 3;
    }
    return 1;
}
