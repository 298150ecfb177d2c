#pragma once

// Reference stationary distribution for tests: the chain is rebuilt from the
// model rules (not from the library's transition table), truncated at level
// j_max with arrivals blocked there, and solved by GTH elimination, which only
// adds nonnegative numbers.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace gth {

struct Model {
    double lambda, mu, alpha;
    int c;
};

struct Reference {
    int c = 0;
    int j_max = 0;
    std::vector<std::vector<double>> pi;  ///< pi[j][i]

    [[nodiscard]] double prob(int i, int j) const {
        if (j > j_max || i > std::min(j, c))
            return 0.0;
        return pi[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
};

inline Reference solve(const Model& m, int j_max) {
    const int c = m.c;
    std::vector<int> offset(static_cast<std::size_t>(j_max) + 2, 0);
    for (int j = 0; j <= j_max; ++j)
        offset[static_cast<std::size_t>(j) + 1] = offset[static_cast<std::size_t>(j)] + std::min(j, c) + 1;
    const auto n = static_cast<std::size_t>(offset.back());
    auto idx = [&](int i, int j) { return static_cast<std::size_t>(offset[static_cast<std::size_t>(j)] + i); };

    std::vector<double> q(n * n, 0.0);
    auto at = [&](std::size_t r, std::size_t s) -> double& { return q[r * n + s]; };
    for (int j = 0; j <= j_max; ++j) {
        for (int i = 0; i <= std::min(j, c); ++i) {
            const std::size_t from = idx(i, j);
            if (j < j_max)
                at(from, idx(i, j + 1)) += m.lambda;
            if (i > 0) {
                // a departure with nobody waiting switches that server off
                if (j > i)
                    at(from, idx(i, j - 1)) += i * m.mu;
                else
                    at(from, idx(i - 1, j - 1)) += i * m.mu;
            }
            const int in_setup = std::min(j - i, c - i);
            if (in_setup > 0)
                at(from, idx(i + 1, j)) += in_setup * m.alpha;
        }
    }

    // GTH: censor states from the last one down.
    std::vector<double> exit_rate(n, 0.0);
    for (std::size_t k = n; k-- > 1;) {
        double out = 0.0;
        for (std::size_t s = 0; s < k; ++s)
            out += at(k, s);
        exit_rate[k] = out;
        for (std::size_t r = 0; r < k; ++r) {
            const double w = at(r, k);
            if (w == 0.0)
                continue;
            for (std::size_t s = 0; s < k; ++s)
                if (s != r)
                    at(r, s) += w * at(k, s) / out;
        }
    }
    std::vector<double> x(n, 0.0);
    x[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < k; ++r)
            s += x[r] * at(r, k);
        x[k] = s / exit_rate[k];
    }
    double total = 0.0;
    for (double v : x)
        total += v;

    Reference ref;
    ref.c = c;
    ref.j_max = j_max;
    ref.pi.resize(static_cast<std::size_t>(j_max) + 1);
    for (int j = 0; j <= j_max; ++j)
        for (int i = 0; i <= std::min(j, c); ++i)
            ref.pi[static_cast<std::size_t>(j)].push_back(x[idx(i, j)] / total);
    return ref;
}

}  // namespace gth
