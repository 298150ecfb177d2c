#pragma once

#include "mmcsetup/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mmcsetup {

/// Primitives of the M/M/c/Setup queue under the ON-OFF policy.
///
/// Jobs arrive at rate `lambda`, each of the `c` servers serves at rate `mu`,
/// and an OFF server needs an exponential setup of rate `alpha` before it can
/// serve. The traffic intensity is derived and cannot be set independently.
struct QueueParams {
    double lambda = 1.0;
    double mu = 1.0;
    double alpha = 1.0;
    int c = 1;

    [[nodiscard]] double rho() const noexcept { return lambda / (static_cast<double>(c) * mu); }

    /// Builds parameters from a traffic intensity instead of an arrival rate.
    static QueueParams from_rho(double rho, double mu, double alpha, int c) {
        return QueueParams{rho * static_cast<double>(c) * mu, mu, alpha, c};
    }
};

/// Parameters that passed `validate`: positive rates, c >= 1 and rho < 1.
/// Solvers only accept this type, so an unstable model cannot reach them.
class ValidatedParams {
public:
    [[nodiscard]] double lambda() const noexcept { return p_.lambda; }
    [[nodiscard]] double mu() const noexcept { return p_.mu; }
    [[nodiscard]] double alpha() const noexcept { return p_.alpha; }
    [[nodiscard]] int c() const noexcept { return p_.c; }
    [[nodiscard]] double rho() const noexcept { return p_.rho(); }
    [[nodiscard]] const QueueParams& raw() const noexcept { return p_; }

private:
    explicit ValidatedParams(const QueueParams& p) : p_(p) {}
    friend ValidatedParams validate(const QueueParams& params);

    QueueParams p_;
};

inline ValidatedParams validate(const QueueParams& params) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(params.lambda))
        throw Error(ErrorCode::InvalidParameter, "lambda must be a positive finite number");
    if (!positive(params.mu))
        throw Error(ErrorCode::InvalidParameter, "mu must be a positive finite number");
    if (!positive(params.alpha))
        throw Error(ErrorCode::InvalidParameter, "alpha must be a positive finite number");
    if (params.c < 1)
        throw Error(ErrorCode::InvalidParameter, "c must be at least 1");
    if (!(params.rho() < 1.0))
        throw UnstableError(params.rho());
    return ValidatedParams(params);
}

/// Cost rates: per active server, per server in setup, per idle server (ON-IDLE
/// baseline only) and per OFF->ON switch.
struct CostParams {
    double c_active = 1.0;
    double c_setup = 1.0;
    double c_idle = 0.6;
    double c_switch = 1.0;

    void check() const {
        for (double v : {c_active, c_setup, c_idle, c_switch})
            if (!(std::isfinite(v) && v >= 0.0))
                throw Error(ErrorCode::InvalidParameter, "cost rates must be finite and >= 0");
    }
};

/// (i, j): i active servers, j jobs in the system.
struct State {
    int i = 0;
    int j = 0;

    friend bool operator==(const State&, const State&) = default;
};

inline int setup_count(const State& s, int c) noexcept { return std::min(s.j - s.i, c - s.i); }

inline bool in_state_space(const State& s, int c) noexcept {
    return s.i >= 0 && s.i <= c && s.j >= s.i;
}

struct Transition {
    State to;
    double rate = 0.0;
};

/// Outgoing transitions of state `s`, in the order arrival, service, setup.
/// Zero-rate transitions are omitted.
///
/// A service completion with waiting jobs keeps the server busy (and cancels one
/// setup if it became redundant); with no waiting jobs the server turns off.
inline std::vector<Transition> transition_rates(const State& s, const ValidatedParams& p) {
    const int c = p.c();
    if (!in_state_space(s, c))
        throw Error(ErrorCode::InvalidState,
                    "(" + std::to_string(s.i) + ", " + std::to_string(s.j) + ") is outside S");
    std::vector<Transition> out;
    out.reserve(3);
    out.push_back({{s.i, s.j + 1}, p.lambda()});
    if (s.i > 0) {
        const double rate = s.i * p.mu();
        if (s.j > s.i)
            out.push_back({{s.i, s.j - 1}, rate});
        else
            out.push_back({{s.i - 1, s.j - 1}, rate});
    }
    if (const int setups = setup_count(s, c); setups > 0)
        out.push_back({{s.i + 1, s.j}, setups * p.alpha()});
    return out;
}

inline double total_outflow(const State& s, const ValidatedParams& p) {
    double total = 0.0;
    for (const auto& t : transition_rates(s, p))
        total += t.rate;
    return total;
}

/// Erlang-C probability of waiting in M/M/c, through the stable Erlang-B recursion.
inline double erlang_c(int c, double offered_load) {
    double b = 1.0;
    for (int k = 1; k <= c; ++k)
        b = offered_load * b / (k + offered_load * b);
    const double rho = offered_load / c;
    return b / (1.0 - rho * (1.0 - b));
}

/// Job-count distribution of the setup-free M/M/c queue, P(N = n) for n <= n_max.
inline std::vector<double> mmc_pmf(const ValidatedParams& p, int n_max) {
    const int c = p.c();
    const double a = p.lambda() / p.mu();
    std::vector<double> w(static_cast<std::size_t>(n_max) + 1, 0.0);
    // Work relative to the mass at n = c to avoid overflow of a^n / n!.
    std::vector<double> head(static_cast<std::size_t>(c) + 1);
    head[static_cast<std::size_t>(c)] = 1.0;
    for (int n = c; n > 0; --n)
        head[static_cast<std::size_t>(n - 1)] = head[static_cast<std::size_t>(n)] * n / a;
    double norm = 0.0;
    for (double h : head)
        norm += h;
    norm += p.rho() / (1.0 - p.rho());  // sum of rho^k, k >= 1
    for (int n = 0; n <= n_max; ++n) {
        const double mass = n <= c ? head[static_cast<std::size_t>(n)] : std::pow(p.rho(), n - c);
        w[static_cast<std::size_t>(n)] = mass / norm;
    }
    return w;
}

struct OnIdleBaseline {
    double mean_jobs = 0.0;
    double cost = 0.0;
};

/// M/M/c (ON-IDLE) mean number in system and its linear power cost
/// c*rho*C_a + c*(1-rho)*C_i.
inline OnIdleBaseline mmc_baseline(const ValidatedParams& p, const CostParams& costs) {
    const double rho = p.rho();
    const double c = p.c();
    const double a = p.lambda() / p.mu();
    const double lq = erlang_c(p.c(), a) * rho / (1.0 - rho);
    return {lq + a, c * rho * costs.c_active + c * (1.0 - rho) * costs.c_idle};
}

}  // namespace mmcsetup
