#pragma once

#include <string>
#include <vector>

#include "lsinf/connection.hpp"

namespace lsinf {

/// Point of the unit sphere bundle: chart position plus frame coefficients
/// of a G-unit vector.
struct GeodesicState {
    ChartPoint p;
    std::vector<double> v;  // frame coefficients, |v|_G = 1
};

inline double frame_norm(const MetricOnA& g, const ChartPoint& p, const std::vector<double>& v) {
    MatD G = metric_values(g, p);
    double s = 0.0;
    for (int i = 0; i < G.rows; ++i)
        for (int j = 0; j < G.cols; ++j) s += v[i] * G(i, j) * v[j];
    return std::sqrt(s);
}

/// Normalizes the direction to the unit sphere of (A_p, G).
inline GeodesicState make_state(const Algebroid& a, const MetricOnA& g, const ChartPoint& p,
                                std::vector<double> dir) {
    if (!a.chart.is_interior(p)) throw std::domain_error("make_state: point not interior");
    if (dir.size() != a.rank) throw std::invalid_argument("make_state: direction size != rank");
    double nrm = frame_norm(g, p, dir);
    if (!(nrm > 0.0)) throw std::invalid_argument("make_state: zero direction");
    for (double& c : dir) c /= nrm;
    return {p, std::move(dir)};
}

/// Right-hand side of the geodesic ODE in the frame picture:
///   dp = rho(p)^T v,   dv^k = -Gamma^k_ij(p) v^i v^j.
struct SprayOut {
    std::vector<double> dp, dv;
};

inline SprayOut spray(const Algebroid& a, const MetricOnA& g, const GeodesicState& s) {
    const int r = static_cast<int>(a.rank), n = a.dim();
    FrameGeometry fg = frame_geometry(a, g, s.p, 0);
    SprayOut out;
    out.dp.assign(n, 0.0);
    out.dv.assign(r, 0.0);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < r; ++i) out.dp[l] += fg.rho(i, l).value() * s.v[i];
    for (int k = 0; k < r; ++k) {
        double acc = 0.0;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) acc += fg.gamma.at({i, j, k}).value() * s.v[i] * s.v[j];
        out.dv[k] = -acc;
    }
    return out;
}

enum class FlowStatus { Ok, UnderflowAbort, DriftReject };

struct TrajectoryPoint {
    double t = 0.0;
    GeodesicState s;
    double drift = 0.0;  // |v|_G - 1 before renormalization
    int boundary_depth = 0;
    double min_corner = 0.0;  // +inf when the chart has no corner coordinates
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    FlowStatus status = FlowStatus::Ok;
    int abort_step = -1;
    std::string message;
};

/// Fixed-step classical RK4 on (p, v) with per-step renormalization of v to
/// the unit sphere (pre-renormalization drift recorded). Boundary approach
/// never terminates the run; only floating underflow of a corner coordinate
/// to <= 0 aborts, which for a tangent structure indicates dt is too coarse.
/// Negative T integrates backwards.
inline Trajectory integrate(const Algebroid& a, const MetricOnA& g, const GeodesicState& s0,
                            double T, double dt, int store_every = 1) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    const int r = static_cast<int>(a.rank), n = a.dim(), k = a.chart.corner_codim();
    const double dir = T < 0 ? -1.0 : 1.0;
    const long nsteps = static_cast<long>(std::llround(std::abs(T) / dt));
    Trajectory traj;

    auto record = [&](double t, const GeodesicState& s, double drift) {
        TrajectoryPoint tp;
        tp.t = t;
        tp.s = s;
        tp.drift = drift;
        tp.boundary_depth = a.chart.boundary_depth(s.p);
        tp.min_corner = std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) tp.min_corner = std::min(tp.min_corner, s.p.x[i]);
        traj.points.push_back(std::move(tp));
    };

    GeodesicState s = s0;
    record(0.0, s, 0.0);
    const double h = dir * dt;
    for (long step = 1; step <= nsteps; ++step) {
        auto add = [&](const GeodesicState& base, const SprayOut& d, double scale) {
            GeodesicState out = base;
            for (int i = 0; i < n; ++i) out.p.x[i] += scale * d.dp[i];
            for (int i = 0; i < r; ++i) out.v[i] += scale * d.dv[i];
            return out;
        };
        SprayOut k1, k2, k3, k4;
        try {
            k1 = spray(a, g, s);
            k2 = spray(a, g, add(s, k1, h / 2));
            k3 = spray(a, g, add(s, k2, h / 2));
            k4 = spray(a, g, add(s, k3, h));
        } catch (const std::exception& e) {
            traj.status = FlowStatus::UnderflowAbort;
            traj.abort_step = static_cast<int>(step);
            traj.message = std::string("spray evaluation failed: ") + e.what();
            return traj;
        }
        GeodesicState next = s;
        for (int i = 0; i < n; ++i)
            next.p.x[i] += (h / 6) * (k1.dp[i] + 2 * k2.dp[i] + 2 * k3.dp[i] + k4.dp[i]);
        for (int i = 0; i < r; ++i)
            next.v[i] += (h / 6) * (k1.dv[i] + 2 * k2.dv[i] + 2 * k3.dv[i] + k4.dv[i]);
        for (int i = 0; i < k; ++i)
            if (next.p.x[i] <= 0.0) {
                traj.status = FlowStatus::UnderflowAbort;
                traj.abort_step = static_cast<int>(step);
                traj.message = "corner coordinate underflowed to non-positive value";
                return traj;
            }
        double nrm = frame_norm(g, next.p, next.v);
        double drift = nrm - 1.0;
        if (std::abs(drift) > 1e-3) {
            traj.status = FlowStatus::DriftReject;
            traj.abort_step = static_cast<int>(step);
            traj.message = "single-step norm drift exceeded 1e-3; reduce dt";
            return traj;
        }
        for (double& c : next.v) c /= nrm;
        s = next;
        if (step % store_every == 0 || step == nsteps) record(dir * (double(step) * dt), s, drift);
    }
    return traj;
}

/// True iff boundary depth never changed and corner coordinates that started
/// positive stayed positive.
inline bool boundary_depth_invariance(const Trajectory& traj) {
    if (traj.points.empty()) return false;
    if (traj.status != FlowStatus::Ok) return false;
    int d0 = traj.points.front().boundary_depth;
    for (const auto& tp : traj.points) {
        if (tp.boundary_depth != d0) return false;
        if (tp.min_corner <= 0.0) return false;
    }
    return true;
}

struct CompletenessReport {
    double time = 0.0;
    double arc_length = 0.0;  // = time up to norm drift
    double max_abs_drift = 0.0;
    double min_corner = 0.0;
    bool consistent_with_completeness = false;
};

/// Integrates for time T and checks the completeness signature: unit-speed
/// arc length T accumulated while all corner coordinates stay positive.
inline CompletenessReport completeness_probe(const Algebroid& a, const MetricOnA& g,
                                             const GeodesicState& s0, double T, double dt = 1e-3) {
    Trajectory traj = integrate(a, g, s0, T, dt, 16);
    CompletenessReport rep;
    rep.time = T;
    rep.arc_length = std::abs(T);  // renormalized unit speed
    rep.min_corner = std::numeric_limits<double>::infinity();
    for (const auto& tp : traj.points) {
        rep.max_abs_drift = std::max(rep.max_abs_drift, std::abs(tp.drift));
        rep.min_corner = std::min(rep.min_corner, tp.min_corner);
    }
    rep.consistent_with_completeness =
        traj.status == FlowStatus::Ok && boundary_depth_invariance(traj);
    return rep;
}

}  // namespace lsinf
