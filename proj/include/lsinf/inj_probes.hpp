#pragma once

#include <vector>

#include "lsinf/forms.hpp"
#include "lsinf/geodesic.hpp"

namespace lsinf {

// Numerical probes for the injectivity-radius criteria. These are one-sided
// checks at desk scale: a pass supports the criterion on the sampled data, a
// fail is inconclusive where the sampling under-covers (noted per report).

struct ControlledReport {
    double delta = 0.0;
    /// max over coordinate directions i of
    ///   max_ball g(d_i, d_i) / min_ball g(d_i, d_i),
    /// the ball approximated by a fan of geodesics of length <= delta.
    double ratio = 1.0;
    int points_sampled = 0;
    const char* coverage = "geodesic-fan approximation; under-covers the metric ball";
};

inline ControlledReport controlled_check(const Algebroid& a, const MetricOnA& g,
                                         const ChartPoint& p, double delta, int n_dirs,
                                         int n_ball_samples, Rng& rng, double dt = 1e-3) {
    if (!a.square()) throw std::domain_error("controlled_check: rank != dim");
    ControlledReport rep;
    rep.delta = delta;
    const int n = a.dim();
    std::vector<ChartPoint> cloud{p};
    if (delta > 0.0) {
        for (int d = 0; d < n_dirs; ++d) {
            std::vector<double> dir(n);
            double nz = 0.0;
            for (int i = 0; i < n; ++i) {
                dir[i] = rng.uniform(-1.0, 1.0);
                nz += dir[i] * dir[i];
            }
            if (nz == 0.0) dir[0] = 1.0;
            GeodesicState s0 = make_state(a, g, p, dir);
            int per = std::max(1, n_ball_samples);
            int every = static_cast<int>(std::max<long>(1, std::llround(delta / dt) / per));
            Trajectory traj = integrate(a, g, s0, delta, dt, every);
            if (traj.status != FlowStatus::Ok)
                throw eval_error("controlled_check: integration failed inside the ball");
            for (const auto& tp : traj.points) cloud.push_back(tp.s.p);
        }
    }
    rep.points_sampled = static_cast<int>(cloud.size());
    for (int i = 0; i < n; ++i) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& q : cloud) {
            MatD gm = induced_metric(a, g, q);
            lo = std::min(lo, gm(i, i));
            hi = std::max(hi, gm(i, i));
        }
        rep.ratio = std::max(rep.ratio, hi / lo);
    }
    return rep;
}

struct CvfeReport {
    std::vector<std::vector<double>> coefficients;  // per dyadic level
    std::vector<double> diffs;
    bool pass = false;
};

/// Coordinate-vector-field extension test for direction v: the frame
/// coefficients of X_v = phi_* v / |phi_* v|_g must converge (be Cauchy)
/// as x_face -> 0.
inline CvfeReport cvfe_check(const Algebroid& a, const MetricOnA& g, int face,
                             const std::vector<double>& v, int m_min = 4, int m_max = 24) {
    if (!a.square()) throw std::domain_error("cvfe_check: rank != dim");
    if (face < 1 || face > a.chart.corner_codim())
        throw std::out_of_range("cvfe_check: invalid face");
    double nz = 0.0;
    for (double c : v) nz += c * c;
    if (nz == 0.0) throw std::invalid_argument("cvfe_check: zero direction");
    const int n = a.dim();
    CvfeReport rep;
    for (int m = m_min; m <= m_max; ++m) {
        ChartPoint p;
        p.x.assign(n, 0.0);
        for (int i = 0; i < n; ++i) p.x[i] = i < a.chart.corner_codim() ? 0.5 : 0.25;
        p.x[face - 1] = std::ldexp(1.0, -m);
        MatD rho = anchor_matrix(a, p);
        auto sv = singular_values(rho);
        double smin = sv[0];
        for (double s : sv) smin = std::min(smin, s);
        if (smin < 1e-250) break;  // frame left double range; test the prefix
        MatD gm = induced_metric(a, g, p);
        double vlen = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) vlen += v[i] * gm(i, j) * v[j];
        double fv = 1.0 / std::sqrt(vlen);
        // frame coefficients: solve rho^T c = f_v * v
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = fv * v[i];
        rep.coefficients.push_back(solve(rho.transposed(), rhs));
    }
    for (std::size_t i = 0; i + 1 < rep.coefficients.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < rep.coefficients[i].size(); ++j)
            d = std::max(d, std::abs(rep.coefficients[i + 1][j] - rep.coefficients[i][j]));
        rep.diffs.push_back(d);
    }
    // Cauchy: the tail of successive differences must be negligible
    rep.pass = rep.diffs.size() >= 3;
    if (rep.pass) {
        for (std::size_t i = rep.diffs.size() - 3; i < rep.diffs.size(); ++i)
            if (!(rep.diffs[i] < 1e-6)) rep.pass = false;
    }
    return rep;
}

struct LceReport {
    double max_closedness_residual = 0.0;
    double worst_condition = 0.0;
    bool closed = false;
    bool spanning = false;
    bool pass = false;
};

/// Local-closed-extension test: `candidates` are r coordinate 1-forms (rows
/// of coefficient expressions w_a, meaning sum_a w_a dx^a). Pass iff each is
/// closed as an algebroid form at interior samples, and their value matrix
/// on the frame stays invertible along the boundary approach.
inline LceReport lce_check(const Algebroid& a, const MetricOnA& g,
                           const std::vector<std::vector<Expr>>& candidates, int face = 1,
                           int m_min = 4, int m_max = 24) {
    const int r = static_cast<int>(a.rank), n = a.dim();
    if (static_cast<int>(candidates.size()) != r)
        throw std::invalid_argument("lce_check: need exactly rank candidate forms");
    for (const auto& c : candidates)
        if (static_cast<int>(c.size()) != n)
            throw std::invalid_argument("lce_check: candidate coefficient count != dimension");
    LceReport rep;
    // A-form components of candidate k: omega_k(X_i) = sum_a w_a rho_ia
    auto pairing_jets = [&](const ChartPoint& p, int order) {
        Mat<Jet> rho = anchor_jets(a, p, order);
        Mat<Jet> M(r, r, zero_like(rho(0, 0)));
        for (int kf = 0; kf < r; ++kf)
            for (int i = 0; i < r; ++i) {
                Jet s = candidates[kf][0].jet(p.x, order) * rho(i, 0);
                for (int aa = 1; aa < n; ++aa)
                    s = s + candidates[kf][aa].jet(p.x, order) * rho(i, aa);
                M(kf, i) = s;
            }
        return M;
    };
    // (a) closedness at interior samples
    {
        Rng rng(20);
        for (int s = 0; s < 12; ++s) {
            ChartPoint p = detail::random_interior_point(a.chart, rng, 0.1, 0.9);
            FrameGeometry fg = frame_geometry(a, g, p, 1);
            Mat<Jet> M = pairing_jets(p, 1);
            for (int kf = 0; kf < r; ++kf) {
                FormJets w{1, r, {}};
                for (int i = 0; i < r; ++i) w.comp.push_back(M(kf, i));
                FormJets dw = deRham_d(fg, w);
                for (const Jet& cjet : dw.comp)
                    rep.max_closedness_residual =
                        std::max(rep.max_closedness_residual, std::abs(cjet.value()));
            }
        }
        rep.closed = rep.max_closedness_residual < 1e-8;
    }
    // (b) value matrix invertible along the boundary approach
    {
        for (int m = m_min; m <= m_max; ++m) {
            ChartPoint p;
            p.x.assign(n, 0.0);
            for (int i = 0; i < n; ++i) p.x[i] = i < a.chart.corner_codim() ? 0.5 : 0.25;
            p.x[face - 1] = std::ldexp(1.0, -m);
            Mat<Jet> M = pairing_jets(p, 0);
            MatD Mv(r, r, 0.0);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) Mv(i, j) = M(i, j).value();
            rep.worst_condition = std::max(rep.worst_condition, cond_number(Mv));
        }
        rep.spanning = rep.worst_condition < 1e6;
    }
    rep.pass = rep.closed && rep.spanning;
    return rep;
}

struct InjectivityReport {
    double validated_radius = 0.0;
    double r_max = 0.0;
    int n_dirs = 0;
    const char* note =
        "chord-separation test: necessary condition only, cannot certify a positive radius";
};

namespace detail {

/// Length of the straight chart segment from p to q in the induced metric
/// (midpoint quadrature). An upper bound for the distance.
inline double segment_length(const Algebroid& a, const MetricOnA& g, const ChartPoint& p,
                             const ChartPoint& q, int cells = 32) {
    const int n = a.dim();
    std::vector<double> chord(n);
    for (int i = 0; i < n; ++i) chord[i] = q.x[i] - p.x[i];
    double len = 0.0;
    ChartPoint mid;
    mid.x.resize(n);
    for (int c = 0; c < cells; ++c) {
        double t = (c + 0.5) / cells;
        for (int i = 0; i < n; ++i) mid.x[i] = p.x[i] + t * chord[i];
        MatD gm = induced_metric(a, g, mid);
        double q2 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) q2 += chord[i] * gm(i, j) * chord[j];
        len += std::sqrt(q2) / cells;
    }
    return len;
}

}  // namespace detail

/// Shoots a fan of geodesics and checks that endpoints of distinct
/// directions stay pairwise separated by at least (angle * radius) / 2 on a
/// radius grid; returns the largest radius passing the test.
inline InjectivityReport injectivity_probe(const Algebroid& a, const MetricOnA& g,
                                           const ChartPoint& p, double r_max, int n_dirs, Rng& rng,
                                           double dt = 1e-3, int radius_grid = 8) {
    if (!a.square()) throw std::domain_error("injectivity_probe: rank != dim");
    InjectivityReport rep;
    rep.r_max = r_max;
    rep.n_dirs = n_dirs;
    const int n = a.dim();
    // random G-unit directions with recorded pairwise angles
    std::vector<std::vector<double>> dirs;
    for (int d = 0; d < n_dirs; ++d) {
        std::vector<double> v(n);
        double nz = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = rng.uniform(-1.0, 1.0);
            nz += v[i] * v[i];
        }
        if (nz == 0.0) v[0] = 1.0;
        dirs.push_back(make_state(a, g, p, v).v);
    }
    MatD G0 = metric_values(g, p);
    auto angle = [&](int i, int j) {
        double c = 0.0;
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) c += dirs[i][s] * G0(s, t) * dirs[j][t];
        return std::acos(std::clamp(c, -1.0, 1.0));
    };
    // integrate each direction once, keeping states at the radius grid;
    // the actual arc radius at each grid node is the stored time stamp
    std::vector<std::vector<ChartPoint>> endpoints(n_dirs);
    std::vector<double> radii;
    const int steps_per_radius =
        static_cast<int>(std::max<long>(1, std::llround(r_max / radius_grid / dt)));
    for (int d = 0; d < n_dirs; ++d) {
        GeodesicState s0{p, dirs[d]};
        Trajectory traj = integrate(a, g, s0, r_max, dt, steps_per_radius);
        if (traj.status != FlowStatus::Ok) throw eval_error("injectivity_probe: integration failed");
        for (std::size_t tp = 1; tp < traj.points.size(); ++tp) {
            endpoints[d].push_back(traj.points[tp].s.p);
            if (d == 0) radii.push_back(traj.points[tp].t);
        }
    }
    rep.validated_radius = 0.0;
    for (std::size_t rg = 0; rg < radii.size(); ++rg) {
        double radius = radii[rg];
        bool ok = true;
        for (int i = 0; i < n_dirs && ok; ++i)
            for (int j = i + 1; j < n_dirs && ok; ++j) {
                double need = angle(i, j) * radius / 2.0;
                double sep = detail::segment_length(a, g, endpoints[i][rg], endpoints[j][rg]);
                if (sep < need) ok = false;
            }
        if (!ok) break;
        rep.validated_radius = radius;
    }
    return rep;
}

}  // namespace lsinf
