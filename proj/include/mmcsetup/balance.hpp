#pragma once

#include "mmcsetup/core_model.hpp"
#include "mmcsetup/joint_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mmcsetup {

struct BalanceCheck {
    double max_relative = 0.0;  ///< max |in - out| / max(in, out)
    double max_absolute = 0.0;
    State worst;
    bool negative_mass = false;  ///< some pi_{i,j} < 0 was seen
};

/// Global balance residuals of `d` against the model generator on the states
/// with j <= j_max. Flows into level j_max come from level j_max + 1, which is
/// evaluated from the distribution as well.
inline BalanceCheck balance_residual(const JointDistribution& d, const ValidatedParams& p, int j_max) {
    const int c = p.c();
    std::vector<std::vector<double>> levels;
    levels.reserve(static_cast<std::size_t>(j_max) + 2);
    for (int j = 0; j <= j_max + 1; ++j)
        levels.push_back(d.level(j));

    std::vector<std::vector<double>> inflow(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j)
        inflow[j].assign(levels[j].size(), 0.0);

    BalanceCheck out;
    for (int j = 0; j <= j_max + 1; ++j) {
        for (int i = 0; i <= std::min(j, c); ++i) {
            const double v = levels[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            if (v < 0.0)
                out.negative_mass = true;
            for (const auto& t : transition_rates({i, j}, p))
                if (t.to.j <= j_max)
                    inflow[static_cast<std::size_t>(t.to.j)][static_cast<std::size_t>(t.to.i)] += v * t.rate;
        }
    }
    for (int j = 0; j <= j_max; ++j) {
        for (int i = 0; i <= std::min(j, c); ++i) {
            const double v = levels[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            const double outflow = v * total_outflow({i, j}, p);
            const double in = inflow[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            const double gap = std::abs(in - outflow);
            const double scale = std::max(std::abs(in), std::abs(outflow));
            const double rel = scale > 0.0 ? gap / scale : 0.0;
            out.max_absolute = std::max(out.max_absolute, gap);
            if (rel > out.max_relative) {
                out.max_relative = rel;
                out.worst = {i, j};
            }
        }
    }
    return out;
}

}  // namespace mmcsetup
