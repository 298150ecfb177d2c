#pragma once

#include "mmcsetup/wide_real.hpp"

#include <cstddef>
#include <vector>

namespace mmcsetup {

/// Partial fraction expansion of a row's tail generating function
///   T(z) = sum_u sum_{m>=1} terms[u][m-1] / (node_u - z)^m.
/// Nodes absent from the row have an empty term list.
using PoleRow = std::vector<std::vector<wide_real>>;

/// T(x) for x away from the nodes.
inline wide_real pole_value(const PoleRow& row, const std::vector<wide_real>& nodes, wide_real x) {
    wide_real s = 0;
    for (std::size_t u = 0; u < row.size(); ++u) {
        const wide_real inv = 1 / (nodes[u] - x);
        wide_real p = inv;
        for (const wide_real& a : row[u]) {
            s += a * p;
            p *= inv;
        }
    }
    return s;
}

/// d^s/dx^s T(x): each term contributes a_m (m)_s / (node - x)^{m+s}.
inline wide_real pole_derivative(const PoleRow& row, const std::vector<wide_real>& nodes, wide_real x,
                                 int s) {
    wide_real out = 0;
    for (std::size_t u = 0; u < row.size(); ++u) {
        const wide_real inv = 1 / (nodes[u] - x);
        for (std::size_t k = 0; k < row[u].size(); ++k) {
            const int m = static_cast<int>(k) + 1;
            wide_real rising = 1;
            for (int r = 0; r < s; ++r)
                rising *= m + r;
            out += row[u][k] * rising * wide_pow(inv, m + s);
        }
    }
    return out;
}

/// Coefficient of z^n in T: sum a_m C(n+m-1, m-1) node^{-(n+m)}.
inline wide_real pole_series_coefficient(const PoleRow& row, const std::vector<wide_real>& nodes, int n) {
    wide_real out = 0;
    for (std::size_t u = 0; u < row.size(); ++u) {
        if (row[u].empty())
            continue;
        const wide_real inv = 1 / nodes[u];
        wide_real p = wide_pow(inv, n + 1);
        wide_real binom = 1;  // C(n+m-1, m-1)
        for (std::size_t k = 0; k < row[u].size(); ++k) {
            const int m = static_cast<int>(k) + 1;
            if (m > 1)
                binom = binom * (n + m - 1) / (m - 1);
            out += row[u][k] * binom * p;
            p *= inv;
        }
    }
    return out;
}

}  // namespace mmcsetup
