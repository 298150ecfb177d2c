#pragma once

#include "mmcsetup/core_model.hpp"
#include "mmcsetup/des_sim.hpp"
#include "mmcsetup/errors.hpp"
#include "mmcsetup/gf_solver.hpp"
#include "mmcsetup/joint_distribution.hpp"
#include "mmcsetup/measures.hpp"
#include "mmcsetup/qbd_solver.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace mmcsetup {

using Json = nlohmann::ordered_json;

inline Json to_json(const QueueParams& p) {
    return Json{{"lambda", p.lambda}, {"mu", p.mu}, {"alpha", p.alpha}, {"c", p.c}, {"rho", p.rho()}};
}

inline Json to_json(const CostParams& k) {
    return Json{{"c_active", k.c_active}, {"c_setup", k.c_setup}, {"c_idle", k.c_idle}, {"c_switch", k.c_switch}};
}

inline Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k)
            row.push_back(m(r, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json to_json(const PerformanceReport& r) {
    return Json{{"e_active", r.e_active},
                {"e_setup", r.e_setup},
                {"switching_rate", r.switching_rate},
                {"e_jobs", r.e_jobs},
                {"marginal", r.marginal},
                {"cost_onoff", r.cost_onoff},
                {"cost_onidle", r.cost_onidle},
                {"total_cost_onoff", r.total_cost_onoff},
                {"e_jobs_onidle", r.e_jobs_onidle}};
}

inline Json to_json(const DecompositionReport& d) {
    return Json{{"support", d.dist_qc.size()},
                {"tv_gap", d.tv_gap},
                {"truncated_mass", d.truncated_mass},
                {"dist_qc", d.dist_qc},
                {"dist_onidle", d.dist_onidle},
                {"dist_res", d.dist_res},
                {"convolution", d.convolution}};
}

inline Json to_json(const Interval& iv) { return Json{{"mean", iv.mean}, {"half_width", iv.half_width}}; }

inline Json to_json(const SimEstimate& s) {
    Json marg = Json::array();
    for (const auto& iv : s.marginal)
        marg.push_back(to_json(iv));
    return Json{{"events", s.events},
                {"simulated_time", s.simulated_time},
                {"e_jobs", to_json(s.e_jobs)},
                {"e_active", to_json(s.e_active)},
                {"e_setup", to_json(s.e_setup)},
                {"switching_rate", to_json(s.switching_rate)},
                {"setup_completions", to_json(s.setup_completions)},
                {"marginal", std::move(marg)}};
}

inline Json to_json(const ValidationReport& v) {
    Json checks = Json::array();
    for (const auto& c : v.checks)
        checks.push_back(Json{{"metric", c.name},
                              {"analytic", c.analytic},
                              {"simulated", c.simulated},
                              {"half_width", c.half_width},
                              {"pass", c.pass}});
    return Json{{"pass", v.all_pass()}, {"checks", std::move(checks)}};
}

/// Boundary pmf rows: entry [i][j-i] is pi_{i,j} for j = i..c.
inline Json boundary_json(const JointDistribution& d) { return Json(d.boundary()); }

inline Json to_json(const GfSolution& s) {
    std::vector<double> z, zhat, nodes;
    for (auto v : s.roots.z)
        z.push_back(to_double(v));
    for (auto v : s.roots.zhat)
        zhat.push_back(to_double(v));
    for (auto v : s.roots.nodes)
        nodes.push_back(to_double(v));
    Json coeff = Json::array();
    for (const auto& row : s.coeff) {
        Json r = Json::array();
        for (const auto& terms : row) {
            std::vector<double> t;
            for (auto a : terms)
                t.push_back(to_double(a));
            r.push_back(t);
        }
        coeff.push_back(std::move(r));
    }
    return Json{{"method", "gf"},
                {"params", to_json(s.params)},
                {"z", z},
                {"zhat", zhat},
                {"poles", nodes},
                {"pole_coefficients", std::move(coeff)},
                {"boundary", s.boundary},
                {"balance_certificate", s.balance_certificate},
                {"factorial_moments", s.moments.full},
                {"factorial_moments_hat", s.moments.hat}};
}

inline Json to_json(const QbdSolution& s) {
    return Json{{"method", "qbd"},
                {"params", to_json(s.params)},
                {"R", to_json(s.rate)},
                {"G", to_json(s.passage)},
                {"levels", s.levels}};
}

inline Json error_json(const Error& e) {
    Json out{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (const auto* u = dynamic_cast<const UnstableError*>(&e))
        out["rho"] = u->rho();
    return out;
}

/// One CSV field, quoted when it holds a comma, quote or line break.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

/// Shortest round-trip decimal form.
inline std::string csv_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k)
            out += ',';
        out += csv_field(fields[k]);
    }
    return out;
}

inline std::vector<std::string> report_csv_header() {
    return {"e_active", "e_setup", "switching_rate", "e_jobs", "cost_onoff", "cost_onidle", "total_cost_onoff",
            "e_jobs_onidle"};
}

inline std::vector<std::string> report_csv_fields(const PerformanceReport& r) {
    return {csv_number(r.e_active),   csv_number(r.e_setup),          csv_number(r.switching_rate),
            csv_number(r.e_jobs),     csv_number(r.cost_onoff),       csv_number(r.cost_onidle),
            csv_number(r.total_cost_onoff), csv_number(r.e_jobs_onidle)};
}

inline std::vector<std::string> decomposition_csv_header() { return {"support", "tv_gap", "truncated_mass"}; }

inline std::vector<std::string> decomposition_csv_fields(const DecompositionReport& d) {
    return {std::to_string(d.dist_qc.size()), csv_number(d.tv_gap), csv_number(d.truncated_mass)};
}

}  // namespace mmcsetup
