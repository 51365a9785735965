#pragma once

#include <string>
#include <vector>

#include "lsinf/algebroid.hpp"

namespace lsinf {

/// Gram matrix of the frame: G_ij = <X_i, X_j> as expressions over the
/// chart. Must be symmetric as written and positive definite on the closed
/// chart box.
struct MetricOnA {
    std::size_t rank = 0;
    std::vector<Expr> entries;  // rank x rank, row-major
    bool is_identity = false;   // enables the trivial-orthonormalization path

    const Expr& at(int i, int j) const { return entries[static_cast<std::size_t>(i) * rank + j]; }

    static MetricOnA identity(std::size_t rank) {
        MetricOnA g;
        g.rank = rank;
        g.entries.assign(rank * rank, Expr::number(0.0));
        for (std::size_t i = 0; i < rank; ++i)
            g.entries[i * rank + i] = Expr::number(1.0);
        g.is_identity = true;
        return g;
    }

    static MetricOnA from_rows(std::vector<std::vector<Expr>> rows) {
        MetricOnA g;
        g.rank = rows.size();
        for (std::size_t i = 0; i < g.rank; ++i) {
            if (rows[i].size() != g.rank)
                throw std::invalid_argument("metric: non-square entry matrix");
            for (std::size_t j = 0; j < i; ++j)
                if (!(rows[i][j] == rows[j][i]) && rows[i][j].print() != rows[j][i].print())
                    throw std::invalid_argument("metric: entries not structurally symmetric");
        }
        for (auto& r : rows)
            for (auto& e : r) g.entries.push_back(e);
        return g;
    }
};

inline MatD metric_values(const MetricOnA& g, const ChartPoint& p) {
    const int r = static_cast<int>(g.rank);
    MatD m(r, r, 0.0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) m(i, j) = g.at(i, j).value(p.x);
    // exact symmetry regardless of expression evaluation order
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) m(j, i) = m(i, j);
    return m;
}

inline Mat<Jet> metric_jets(const MetricOnA& g, const ChartPoint& p, int nvars, int order) {
    const int r = static_cast<int>(g.rank);
    const JetSpace& sp = JetSpace::get(nvars, order);
    Mat<Jet> m(r, r, Jet::constant(sp, 0.0));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j <= i; ++j) {
            m(i, j) = g.at(i, j).jet(p.x, order);
            m(j, i) = m(i, j);
        }
    return m;
}

/// Minimum Gram eigenvalue over samples of the closed chart box (corner
/// coordinates approach 0 by dyadic limit, never evaluated at exactly 0).
inline double spd_floor(const MetricOnA& g, const Chart& chart, Rng& rng, int samples = 64) {
    double lo = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        ChartPoint p;
        p.x.resize(chart.dim());
        for (int i = 0; i < chart.dim(); ++i) {
            if (i < chart.corner_codim()) {
                // mix interior values and boundary-limit samples
                p.x[i] = (s % 3 == 0) ? std::ldexp(1.0, -(4 + static_cast<int>(rng.below(20))))
                                      : rng.uniform(0.0, 1.0) + 1e-12;
            } else {
                p.x[i] = rng.uniform(-1.0, 1.0);
            }
        }
        lo = std::min(lo, min_eigenvalue(metric_values(g, p)));
    }
    return lo;
}

/// Interior Riemannian metric g = rho^{-T} G rho^{-1} (frame pushforward is
/// a g-isometry onto the tangent space).
inline MatD induced_metric(const Algebroid& a, const MetricOnA& g, const ChartPoint& p) {
    if (!a.square()) throw std::domain_error("induced_metric: structure rank != chart dimension");
    if (!a.chart.is_interior(p)) throw std::domain_error("induced_metric: point not interior");
    MatD rho = anchor_matrix(a, p);
    MatD rho_inv = inverse(rho);  // throws on singular anchor
    MatD G = metric_values(g, p);
    MatD out = rho_inv.transposed() * G * rho_inv;
    for (int i = 0; i < out.rows; ++i)
        for (int j = i + 1; j < out.cols; ++j) out(j, i) = out(i, j) = 0.5 * (out(i, j) + out(j, i));
    return out;
}

inline Mat<Jet> induced_metric_jets(const Algebroid& a, const MetricOnA& g, const ChartPoint& p,
                                    int order) {
    Mat<Jet> rho = anchor_jets(a, p, order);
    Mat<Jet> rho_inv = inverse(rho);
    Mat<Jet> G = metric_jets(g, p, a.dim(), order);
    return rho_inv.transposed() * G * rho_inv;
}

/// Random symmetric positive definite Gram matrix with polynomial entries:
/// diagonally dominant on the chart box by construction (degree <= 2,
/// bounded coefficients), so SPD holds everywhere on [0,1]^k x [-1,1]^{n-k}.
inline MetricOnA random_polynomial_metric(const Chart& chart, std::size_t rank, Rng& rng) {
    const int n = chart.dim();
    auto poly = [&](double amp) {
        // amp * (c0 + sum c_i v_i + sum c_ij v_i v_j), coefficients in [-.5, .5]
        auto coef = [&] { return Expr::number(std::round(rng.uniform(-0.5, 0.5) * 1000) / 1000.0); };
        Expr e = coef();
        for (int i = 0; i < n; ++i) {
            Expr v = Expr::var(i, chart.coord_name(i));
            e = e + coef() * v;
            for (int j = i; j < n; ++j)
                e = e + coef() * v * Expr::var(j, chart.coord_name(j));
        }
        return Expr::number(amp) * e;
    };
    std::vector<std::vector<Expr>> rows(rank, std::vector<Expr>(rank, Expr::number(0.0)));
    for (std::size_t i = 0; i < rank; ++i) {
        rows[i][i] = Expr::number(2.0) + poly(0.2);
        for (std::size_t j = i + 1; j < rank; ++j)
            rows[i][j] = rows[j][i] = poly(0.15 / static_cast<double>(rank));
    }
    return MetricOnA::from_rows(std::move(rows));
}

struct BilipschitzResult {
    double constant = 1.0;
    ChartPoint witness;
};

/// Smallest C with C^{-1} g2 <= g1 <= C g2 over the sample set, computed
/// from generalized eigenvalue extrema of the two Gram matrices.
inline BilipschitzResult bilipschitz_constant(const MetricOnA& g1, const MetricOnA& g2,
                                              const std::vector<ChartPoint>& samples) {
    if (samples.empty()) throw std::invalid_argument("bilipschitz_constant: no samples");
    BilipschitzResult out;
    out.constant = 0.0;
    for (const auto& p : samples) {
        MatD A = metric_values(g1, p), B = metric_values(g2, p);
        if (!(min_eigenvalue(A) > 0.0) || !(min_eigenvalue(B) > 0.0))
            throw eval_error("bilipschitz_constant: non-positive-definite metric sample");
        double c = std::max(max_gen_eigenvalue(B, A), max_gen_eigenvalue(A, B));
        if (c > out.constant) {
            out.constant = c;
            out.witness = p;
        }
    }
    return out;
}

}  // namespace lsinf
