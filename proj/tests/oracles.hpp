#pragma once

// Test-only numerical oracles. These stay independent of the jet/connection
// implementation paths they cross-check: everything here is built from plain
// value evaluations and central finite differences.

#include <cmath>
#include <functional>
#include <vector>

#include "lsinf/algebroid.hpp"

namespace oracles {

using lsinf::Algebroid;
using lsinf::ChartPoint;
using lsinf::Expr;

inline double fd_partial(const std::function<double(const std::vector<double>&)>& f,
                         std::vector<double> x, int i, double h = 1e-5) {
    x[i] += h;
    double up = f(x);
    x[i] -= 2 * h;
    double dn = f(x);
    return (up - dn) / (2 * h);
}

inline double fd_partial2(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x, int i, int j, double h = 1e-4) {
    if (i == j) {
        double mid = f(x);
        x[i] += h;
        double up = f(x);
        x[i] -= 2 * h;
        double dn = f(x);
        return (up + dn - 2 * mid) / (h * h);
    }
    auto g = [&](std::vector<double> y) { return fd_partial(f, y, j, h); };
    return fd_partial(g, x, i, h);
}

inline double fd_partial_expr(const Expr& e, const std::vector<double>& x, int i, double h = 1e-5) {
    return fd_partial([&](const std::vector<double>& y) { return e.value(y); }, x, i, h);
}

/// Lie bracket by finite differences of the anchor rows:
/// [X_i, X_j]^m = sum_l (X_i^l d_l X_j^m - X_j^l d_l X_i^m).
inline std::vector<double> fd_bracket(const Algebroid& a, int i, int j, const ChartPoint& p,
                                      double h = 1e-6) {
    const int n = a.dim();
    std::vector<double> out(n, 0.0);
    for (int m = 0; m < n; ++m) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) {
            double xi_l = a.frame[i][l].value(p.x);
            double xj_l = a.frame[j][l].value(p.x);
            acc += xi_l * fd_partial_expr(a.frame[j][m], p.x, l, h) -
                   xj_l * fd_partial_expr(a.frame[i][m], p.x, l, h);
        }
        out[m] = acc;
    }
    return out;
}

}  // namespace oracles
