#pragma once

#include <functional>
#include <vector>

#include "lsinf/connection.hpp"

namespace lsinf {

/// Axis-aligned box, used for quadrature domains and bump supports.
struct Box {
    std::vector<double> lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
    double measure() const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
        return v;
    }
};

/// sqrt(det g) of the induced interior metric; the volume density of the
/// structure. det g = det G / det(rho)^2 for square frames.
inline double volume_density(const Algebroid& a, const MetricOnA& g, const ChartPoint& p) {
    MatD rho = anchor_matrix(a, p);
    MatD G = metric_values(g, p);
    // determinants by LU-free small-size expansion via Cholesky / GJ
    auto det = [](MatD m) {
        double d = 1.0;
        const int n = m.rows;
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
            if (m(piv, col) == 0.0) return 0.0;
            if (piv != col) {
                for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
                d = -d;
            }
            d *= m(col, col);
            for (int r = col + 1; r < n; ++r) {
                double fct = m(r, col) / m(col, col);
                for (int j = col; j < n; ++j) m(r, j) -= fct * m(col, j);
            }
        }
        return d;
    };
    double drho = det(rho);
    if (drho == 0.0) throw eval_error("volume_density: singular anchor");
    return std::sqrt(det(G)) / std::abs(drho);
}

/// Tensor-product midpoint rule over `box` with `cells` subdivisions per
/// axis. The integrand receives the midpoint.
inline double midpoint_integrate(const Box& box, int cells,
                                 const std::function<double(const ChartPoint&)>& f) {
    const int n = box.dim();
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = (box.hi[i] - box.lo[i]) / cells;
    double cell_vol = 1.0;
    for (int i = 0; i < n; ++i) cell_vol *= h[i];
    std::vector<int> idx(n, 0);
    ChartPoint p;
    p.x.resize(n);
    double acc = 0.0;
    for (;;) {
        for (int i = 0; i < n; ++i) p.x[i] = box.lo[i] + (idx[i] + 0.5) * h[i];
        acc += f(p);
        int d = n - 1;
        while (d >= 0 && ++idx[d] == cells) idx[d--] = 0;
        if (d < 0) break;
    }
    return acc * cell_vol;
}

/// Smooth bump supported exactly on `box`: product over axes of
/// exp(-1/(1-u^2)) in the rescaled coordinate u in (-1,1). Outside the box
/// the value is zero (and quadrature never needs to look there).
struct Bump {
    Box support;

    double value(const ChartPoint& p) const {
        double v = 1.0;
        for (int i = 0; i < support.dim(); ++i) {
            double u = rescale(p.x[i], i);
            if (std::abs(u) >= 1.0) return 0.0;
            v *= std::exp(-1.0 / (1.0 - u * u));
        }
        return v;
    }

    /// The bump as an expression valid inside the support box.
    Expr expr(const Chart& chart) const {
        Expr prod = Expr::number(1.0);
        for (int i = 0; i < support.dim(); ++i) {
            double c = 0.5 * (support.lo[i] + support.hi[i]);
            double w = 0.5 * (support.hi[i] - support.lo[i]);
            Expr u = (Expr::var(i, chart.coord_name(i)) - Expr::number(c)) / Expr::number(w);
            prod = prod * Expr::fun(FunKind::Exp,
                                    -(Expr::number(1.0) / (Expr::number(1.0) - u * u)));
        }
        return prod;
    }

private:
    double rescale(double x, int i) const {
        double c = 0.5 * (support.lo[i] + support.hi[i]);
        double w = 0.5 * (support.hi[i] - support.lo[i]);
        return (x - c) / w;
    }
};

struct AdjointCheckResult {
    double lhs = 0.0;       // integral of X(f) dmu
    double rhs = 0.0;       // integral of f div(X) dmu
    double denom = 0.0;     // integral of |f| dmu
    double residual = 0.0;  // |lhs - rhs| / denom
};

/// Numerical test of  int X(f) dmu = int f div(X) dmu  for a bump f.
/// Quadrature runs over the bump support only; the integrand vanishes to all
/// orders at its edge.
inline AdjointCheckResult adjoint_identity_check(const Algebroid& a, const MetricOnA& g,
                                                 const std::vector<Expr>& field_coeffs,
                                                 const Bump& bump, int cells) {
    if (cells < 16) throw std::invalid_argument("adjoint_identity_check: grid too coarse");
    Expr f = bump.expr(a.chart);
    const int r = static_cast<int>(a.rank);
    AdjointCheckResult out;
    double lhs = 0.0, rhs = 0.0, denom = 0.0;
    midpoint_integrate(bump.support, cells, [&](const ChartPoint& p) {
        Jet fj = f.jet(p.x, 1);
        MatD rho = anchor_matrix(a, p);
        double mu = volume_density(a, g, p);
        double Xf = 0.0;
        for (int i = 0; i < r; ++i) {
            double ci = field_coeffs[i].value(p.x);
            for (int l = 0; l < rho.cols; ++l) Xf += ci * rho(i, l) * fj.deriv1(l);
        }
        lhs += Xf * mu;
        rhs += fj.value() * divergence(a, g, field_coeffs, p) * mu;
        denom += std::abs(fj.value()) * mu;
        return 0.0;
    });
    double cell_vol = bump.support.measure() / std::pow(static_cast<double>(cells),
                                                        bump.support.dim());
    out.lhs = lhs * cell_vol;
    out.rhs = rhs * cell_vol;
    out.denom = denom * cell_vol;
    out.residual = std::abs(out.lhs - out.rhs) / out.denom;
    return out;
}

struct VolumeProbeRow {
    int level = 0;  // eps = 2^-level
    double integral = 0.0;
};

struct VolumeProbeReport {
    std::vector<VolumeProbeRow> rows;
    /// Fitted growth per dyadic step, normalized per unit transverse measure
    /// (so a log-divergent integrand gives log 2 regardless of box width).
    double normalized_slope = 0.0;
    bool diverges = false;
};

/// Integrates f dmu over the chart box truncated at x1 >= eps for each
/// dyadic eps; detects divergence as sustained affine growth in the level.
/// Quadrature along x1 is graded into dyadic panels [2^-(j+1), 2^-j] so that
/// 1/x-type densities stay resolved all the way down to eps.
inline VolumeProbeReport volume_probe(const Algebroid& a, const MetricOnA& g, const Expr& f,
                                      const std::vector<int>& levels, int cells_per_axis = 32) {
    const int n = a.dim(), k = a.chart.corner_codim();
    VolumeProbeReport rep;
    double transverse = 1.0;
    for (int i = 0; i < n; ++i)
        if (i >= k) transverse *= 2.0;  // free coordinates span [-1, 1]
    auto integrand = [&](const ChartPoint& p) { return f.value(p.x) * volume_density(a, g, p); };
    for (int lv : levels) {
        double integral = 0.0;
        for (int panel = 0; panel < lv; ++panel) {
            Box box;
            box.lo.resize(n);
            box.hi.resize(n);
            box.lo[0] = std::ldexp(1.0, -(panel + 1));
            box.hi[0] = std::ldexp(1.0, -panel);
            for (int i = 1; i < n; ++i) {
                box.lo[i] = i < k ? 1e-6 : -1.0;
                box.hi[i] = 1.0;
            }
            integral += midpoint_integrate(box, cells_per_axis, integrand);
        }
        rep.rows.push_back({lv, integral});
    }
    // slope per step over the last half of the rows
    if (rep.rows.size() >= 3) {
        std::size_t half = rep.rows.size() / 2;
        double sm = 0, sy = 0, smm = 0, smy = 0;
        int N = 0;
        for (std::size_t i = half; i < rep.rows.size(); ++i) {
            double m = rep.rows[i].level, y = rep.rows[i].integral;
            sm += m;
            sy += y;
            smm += m * m;
            smy += m * y;
            ++N;
        }
        double slope = (N * smy - sm * sy) / (N * smm - sm * sm);
        rep.normalized_slope = slope / transverse;
        rep.diverges = rep.normalized_slope > 0.05;
    }
    return rep;
}

}  // namespace lsinf
