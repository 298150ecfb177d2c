#pragma once

#include "mmcsetup/core_model.hpp"
#include "mmcsetup/errors.hpp"
#include "mmcsetup/measures.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace mmcsetup {

struct SimConfig {
    QueueParams params;
    std::int64_t events = 1'000'000;  ///< total events, warmup included
    double warmup_fraction = 0.1;
    std::uint64_t seed = 1;
    int batches = 20;

    void check() const {
        if (events <= 0)
            throw Error(ErrorCode::InvalidConfig, "events must be positive");
        if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
            throw Error(ErrorCode::InvalidConfig, "warmup fraction must lie in [0, 1)");
        if (batches < 10)
            throw Error(ErrorCode::InvalidConfig, "at least 10 batches are required");
        const auto kept = events - static_cast<std::int64_t>(warmup_fraction * static_cast<double>(events));
        if (kept < batches)
            throw Error(ErrorCode::InvalidConfig, "horizon too short for the batch count");
    }
};

/// Point estimate with a 95% batch-means half-width.
struct Interval {
    double mean = 0.0;
    double half_width = 0.0;
};

struct SimEstimate {
    Interval e_jobs;
    Interval e_active;
    Interval e_setup;
    Interval switching_rate;     ///< ON -> OFF per unit time
    Interval setup_completions;  ///< OFF -> ON per unit time
    std::vector<Interval> marginal;
    std::int64_t events = 0;
    double simulated_time = 0.0;  ///< after warmup
};

namespace detail {

inline Interval batch_interval(const std::vector<double>& batch_means) {
    const auto b = static_cast<double>(batch_means.size());
    double mean = 0.0;
    for (double x : batch_means)
        mean += x;
    mean /= b;
    double var = 0.0;
    for (double x : batch_means)
        var += (x - mean) * (x - mean);
    var /= b - 1.0;
    const boost::math::students_t t(b - 1.0);
    return {mean, boost::math::quantile(boost::math::complement(t, 0.025)) * std::sqrt(var / b)};
}

struct BatchAccumulator {
    double time = 0.0;
    double jobs = 0.0, active = 0.0, setup = 0.0;
    std::int64_t offs = 0, ons = 0;
    std::vector<double> servers;
};

}  // namespace detail

/// Event-by-event simulation of the ON-OFF system. Every holding time is
/// exponential, so the next event is drawn from the total rate. `trace`, if
/// given, receives one CSV line per event.
inline SimEstimate simulate(const SimConfig& cfg, std::ostream* trace = nullptr) {
    cfg.check();
    const ValidatedParams p = validate(cfg.params);
    const int c = p.c();
    const double lambda = p.lambda(), mu = p.mu(), alpha = p.alpha();

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto warmup = static_cast<std::int64_t>(cfg.warmup_fraction * static_cast<double>(cfg.events));
    const std::int64_t kept = cfg.events - warmup;
    const std::int64_t per_batch = kept / cfg.batches;

    int active = 0, setup = 0;
    std::int64_t jobs = 0;
    std::vector<detail::BatchAccumulator> batches(static_cast<std::size_t>(cfg.batches));
    for (auto& b : batches)
        b.servers.assign(static_cast<std::size_t>(c) + 1, 0.0);

    if (trace)
        *trace << "event,time,kind,active,setup,jobs\n";
    double clock = 0.0;
    for (std::int64_t e = 0; e < cfg.events; ++e) {
        const double rate_arrival = lambda;
        const double rate_service = active * mu;
        const double rate_setup = setup * alpha;
        const double total = rate_arrival + rate_service + rate_setup;
        const double dt = -std::log1p(-unit(rng)) / total;

        const std::int64_t k = e - warmup;
        detail::BatchAccumulator* acc = nullptr;
        if (k >= 0) {
            const std::int64_t idx = std::min<std::int64_t>(k / per_batch, cfg.batches - 1);
            acc = &batches[static_cast<std::size_t>(idx)];
            acc->time += dt;
            acc->jobs += dt * static_cast<double>(jobs);
            acc->active += dt * active;
            acc->setup += dt * setup;
            acc->servers[static_cast<std::size_t>(active)] += dt;
        }
        clock += dt;

        const double u = unit(rng) * total;
        const char* kind = nullptr;
        if (u < rate_arrival) {
            kind = "arrival";
            ++jobs;
            if (active + setup < c && jobs - active > setup)
                ++setup;
        } else if (u < rate_arrival + rate_service) {
            kind = "departure";
            --jobs;
            if (jobs >= active) {
                // The freed server takes the next waiting job; a setup that is
                // now redundant is cancelled.
                if (setup > jobs - active)
                    --setup;
            } else {
                --active;
                if (acc)
                    ++acc->offs;
            }
        } else {
            kind = "setup";
            ++active;
            --setup;
            if (acc)
                ++acc->ons;
        }

        const std::int64_t expected = std::min<std::int64_t>(jobs - active, c - active);
        if (active < 0 || active > c || setup != expected || active + setup > c)
            throw Error(ErrorCode::InternalInconsistency,
                        "simulated state violates the setup invariant at event " + std::to_string(e));
        if (trace)
            *trace << e << ',' << clock << ',' << kind << ',' << active << ',' << setup << ',' << jobs << '\n';
    }

    SimEstimate out;
    out.events = cfg.events;
    std::vector<double> l, a, s, sw, on;
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(c) + 1);
    for (const auto& b : batches) {
        out.simulated_time += b.time;
        l.push_back(b.jobs / b.time);
        a.push_back(b.active / b.time);
        s.push_back(b.setup / b.time);
        sw.push_back(static_cast<double>(b.offs) / b.time);
        on.push_back(static_cast<double>(b.ons) / b.time);
        for (int i = 0; i <= c; ++i)
            marg[static_cast<std::size_t>(i)].push_back(b.servers[static_cast<std::size_t>(i)] / b.time);
    }
    out.e_jobs = detail::batch_interval(l);
    out.e_active = detail::batch_interval(a);
    out.e_setup = detail::batch_interval(s);
    out.switching_rate = detail::batch_interval(sw);
    out.setup_completions = detail::batch_interval(on);
    for (const auto& m : marg)
        out.marginal.push_back(detail::batch_interval(m));
    return out;
}

struct MetricCheck {
    std::string name;
    double analytic = 0.0;
    double simulated = 0.0;
    double half_width = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<MetricCheck> checks;
    [[nodiscard]] bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass)
                return false;
        return true;
    }
};

/// Flags every metric with |analytic - simulated| > widths * half-width.
inline ValidationReport validate_against(const PerformanceReport& analytic, const SimEstimate& sim,
                                         double widths = 3.0) {
    ValidationReport out;
    auto add = [&](std::string name, double x, const Interval& iv) {
        out.checks.push_back({std::move(name), x, iv.mean, iv.half_width,
                              std::abs(x - iv.mean) <= widths * iv.half_width});
    };
    add("e_jobs", analytic.e_jobs, sim.e_jobs);
    add("e_active", analytic.e_active, sim.e_active);
    add("e_setup", analytic.e_setup, sim.e_setup);
    add("switching_rate", analytic.switching_rate, sim.switching_rate);
    for (std::size_t i = 0; i < analytic.marginal.size() && i < sim.marginal.size(); ++i)
        add("marginal_" + std::to_string(i), analytic.marginal[i], sim.marginal[i]);
    return out;
}

}  // namespace mmcsetup
