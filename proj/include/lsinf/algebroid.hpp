#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsinf/chart.hpp"
#include "lsinf/linalg.hpp"
#include "lsinf/rng.hpp"

namespace lsinf {

enum class Builtin { B, Scattering, Edge, Zero, DoubleEdge, Theta, Adiabatic, Rotating };

inline const char* builtin_name(Builtin b) {
    switch (b) {
        case Builtin::B: return "b";
        case Builtin::Scattering: return "scattering";
        case Builtin::Edge: return "edge";
        case Builtin::Zero: return "zero";
        case Builtin::DoubleEdge: return "double_edge";
        case Builtin::Theta: return "theta";
        case Builtin::Adiabatic: return "adiabatic";
        case Builtin::Rotating: return "rotating";
    }
    return "?";
}

inline std::optional<Builtin> builtin_from_name(const std::string& s) {
    for (Builtin b : {Builtin::B, Builtin::Scattering, Builtin::Edge, Builtin::Zero,
                      Builtin::DoubleEdge, Builtin::Theta, Builtin::Adiabatic, Builtin::Rotating})
        if (s == builtin_name(b)) return b;
    return std::nullopt;
}

/// A frame-generated boundary-tangent structure on a corner chart: `rank`
/// vector fields given by their coordinate component expressions. Row i of
/// `frame` is X_i; evaluated at a point it is the anchor matrix.
struct Algebroid {
    Chart chart;
    std::size_t rank;
    std::vector<std::vector<Expr>> frame;  // rank x n
    std::string name = "custom";

    int dim() const { return chart.dim(); }
    bool square() const { return static_cast<int>(rank) == chart.dim(); }
};

inline Algebroid make_algebroid(const Chart& chart, std::vector<std::vector<Expr>> rows,
                                std::string name = "custom") {
    if (rows.empty()) throw std::invalid_argument("algebroid: empty frame");
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != chart.dim())
            throw std::invalid_argument("algebroid: frame row length != chart dimension");
    if (rows.size() > static_cast<std::size_t>(chart.dim()))
        throw std::invalid_argument("algebroid: more frame fields than chart dimensions");
    return Algebroid{chart, rows.size(), std::move(rows), std::move(name)};
}

/// The model structures in their local-coordinate normal forms. Charts need
/// k = 1; edge/double_edge/adiabatic split the free coordinates into
/// `base_count` base directions followed by fiber directions.
inline Algebroid builtin_algebroid(Builtin which, const Chart& chart, int base_count = 1) {
    const int n = chart.dim(), k = chart.corner_codim();
    auto zero = Expr::number(0.0);
    auto one = Expr::number(1.0);
    auto x = chart.parse("x1");
    auto need = [&](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("builtin ") + builtin_name(which) +
                                             ": chart dimension mismatch (" + what + ")");
    };
    std::vector<std::vector<Expr>> rows;
    auto unit_row = [&](int j, const Expr& coef) {
        std::vector<Expr> r(n, zero);
        r[j] = coef;
        return r;
    };
    switch (which) {
        case Builtin::B:
            need(k == 1 && n >= 2, "need k=1, n>=2");
            rows.push_back(unit_row(0, x));
            for (int j = 1; j < n; ++j) rows.push_back(unit_row(j, one));
            break;
        case Builtin::Scattering:
        case Builtin::Theta:
            need(k == 1 && n >= 2, "need k=1, n>=2");
            rows.push_back(unit_row(0, x * x));
            for (int j = 1; j < n; ++j) rows.push_back(unit_row(j, x));
            break;
        case Builtin::Zero:
            need(k == 1 && n >= 2, "need k=1, n>=2");
            rows.push_back(unit_row(0, x));
            for (int j = 1; j < n; ++j) rows.push_back(unit_row(j, x));
            break;
        case Builtin::Edge:
            need(k == 1 && n >= 3 && base_count >= 1 && base_count < n - 1, "need k=1, n>=3");
            rows.push_back(unit_row(0, x));
            for (int j = 1; j <= base_count; ++j) rows.push_back(unit_row(j, x));
            for (int j = base_count + 1; j < n; ++j) rows.push_back(unit_row(j, one));
            break;
        case Builtin::DoubleEdge:
            need(k == 1 && n >= 3 && base_count >= 1 && base_count < n - 1, "need k=1, n>=3");
            rows.push_back(unit_row(0, x * x));
            for (int j = 1; j <= base_count; ++j) rows.push_back(unit_row(j, x * x));
            for (int j = base_count + 1; j < n; ++j) rows.push_back(unit_row(j, x));
            break;
        case Builtin::Adiabatic:
            need(k == 1 && n >= 3 && base_count >= 1 && base_count < n - 1, "need k=1, n>=3");
            for (int j = 1; j <= base_count; ++j) rows.push_back(unit_row(j, x));
            for (int j = base_count + 1; j < n; ++j) rows.push_back(unit_row(j, one));
            break;
        case Builtin::Rotating: {
            need(k == 1 && n == 3, "need k=1, n=3");
            Expr amp = chart.parse("exp(-1/x1)");
            Expr s = chart.parse("sin(1/x1)");
            Expr c = chart.parse("cos(1/x1)");
            rows.push_back(unit_row(0, x * x));
            rows.push_back({zero, amp * s, amp * c});
            rows.push_back({zero, amp * c, -(amp * s)});
            break;
        }
    }
    return make_algebroid(chart, std::move(rows), builtin_name(which));
}

inline MatD anchor_matrix(const Algebroid& a, const ChartPoint& p) {
    MatD m(static_cast<int>(a.rank), a.dim(), 0.0);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m(i, j) = a.frame[i][j].value(p.x);
    return m;
}

inline Mat<Jet> anchor_jets(const Algebroid& a, const ChartPoint& p, int order) {
    const JetSpace& sp = JetSpace::get(a.dim(), order);
    Mat<Jet> m(static_cast<int>(a.rank), a.dim(), Jet::constant(sp, 0.0));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m(i, j) = a.frame[i][j].jet(p.x, order);
    return m;
}

/// Frame derivative of a jet along X_i: contracts the anchor row with the
/// coordinate gradient. Output is one order lower than min(h, anchor rows).
inline Jet frame_apply(const Mat<Jet>& rho, int i, const Jet& h) {
    Jet out = rho(i, 0) * h.partial(0);
    for (int l = 1; l < rho.cols; ++l) out = out + rho(i, l) * h.partial(l);
    return out;
}

/// [X_i, X_j] coordinate components as jets:
/// ([X_i,X_j])^m = sum_l (X_i^l d_l X_j^m - X_j^l d_l X_i^m).
inline std::vector<Jet> bracket_jets(const Mat<Jet>& rho, int i, int j) {
    std::vector<Jet> out;
    out.reserve(rho.cols);
    for (int m = 0; m < rho.cols; ++m) {
        Jet acc = rho(i, 0) * rho(j, m).partial(0) - rho(j, 0) * rho(i, m).partial(0);
        for (int l = 1; l < rho.cols; ++l)
            acc = acc + rho(i, l) * rho(j, m).partial(l) - rho(j, l) * rho(i, m).partial(l);
        out.push_back(acc);
    }
    return out;
}

inline std::vector<double> bracket(const Algebroid& a, int i, int j, const ChartPoint& p) {
    if (!a.chart.is_interior(p)) throw std::domain_error("bracket: point not interior");
    auto rho = anchor_jets(a, p, 1);
    auto bj = bracket_jets(rho, i, j);
    std::vector<double> out(bj.size());
    for (std::size_t m = 0; m < bj.size(); ++m) out[m] = bj[m].value();
    return out;
}

struct StructureFunctions {
    // f[i][j][k]: [X_i, X_j] = sum_k f[i][j][k] X_k
    std::vector<std::vector<std::vector<double>>> f;
    double max_residual = 0.0;  // coordinate-space residual of the frame solve
};

namespace detail {

/// Solve rho^T c = w for frame coefficients c (least squares when rank < n).
template <typename T>
std::vector<T> frame_coefficients(const Mat<T>& rho, const std::vector<T>& w) {
    const int r = rho.rows, n = rho.cols;
    if (r == n) {
        Mat<T> rhoTinv = inverse(rho.transposed());
        std::vector<T> c(r, zero_like(w[0]));
        for (int i = 0; i < r; ++i)
            for (int m = 0; m < n; ++m) c[i] = c[i] + rhoTinv(i, m) * w[m];
        return c;
    }
    // normal equations: (rho rho^T) c = rho w
    Mat<T> A(r, r, zero_like(w[0]));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            T s = zero_like(w[0]);
            for (int m = 0; m < n; ++m) s = s + rho(i, m) * rho(j, m);
            A(i, j) = s;
        }
    Mat<T> Ainv = inverse(A);
    std::vector<T> rhs(r, zero_like(w[0])), c(r, zero_like(w[0]));
    for (int i = 0; i < r; ++i)
        for (int m = 0; m < n; ++m) rhs[i] = rhs[i] + rho(i, m) * w[m];
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) c[i] = c[i] + Ainv(i, j) * rhs[j];
    return c;
}

}  // namespace detail

/// f_ij^k at p from the frame solve; `max_residual` reports how far the
/// brackets are from the frame span (large residual = not closed).
inline StructureFunctions structure_functions(const Algebroid& a, const ChartPoint& p) {
    if (!a.chart.is_interior(p)) throw std::domain_error("structure_functions: point not interior");
    const int r = static_cast<int>(a.rank), n = a.dim();
    auto rhoJ = anchor_jets(a, p, 1);
    MatD rho(r, n, 0.0);
    for (int i = 0; i < r; ++i)
        for (int m = 0; m < n; ++m) rho(i, m) = rhoJ(i, m).value();
    StructureFunctions sf;
    sf.f.assign(r, std::vector<std::vector<double>>(r, std::vector<double>(r, 0.0)));
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            auto bj = bracket_jets(rhoJ, i, j);
            std::vector<double> w(n);
            double wn = 0.0;
            for (int m = 0; m < n; ++m) {
                w[m] = bj[m].value();
                wn += w[m] * w[m];
            }
            std::vector<double> c;
            try {
                c = detail::frame_coefficients(rho, w);
            } catch (const eval_error&) {
                throw eval_error("structure_functions: anchor rank-deficient at interior point");
            }
            // residual of rho^T c - w
            double res = 0.0;
            for (int m = 0; m < n; ++m) {
                double s = -w[m];
                for (int l = 0; l < r; ++l) s += rho(l, m) * c[l];
                res += s * s;
            }
            res = std::sqrt(res) / (1.0 + std::sqrt(wn));
            sf.max_residual = std::max(sf.max_residual, res);
            for (int kk = 0; kk < r; ++kk) {
                sf.f[i][j][kk] = c[kk];
                sf.f[j][i][kk] = -c[kk];
            }
        }
    return sf;
}

/// Jet-valued structure functions (needed by curvature derivatives).
inline std::vector<std::vector<std::vector<Jet>>> structure_function_jets(const Mat<Jet>& rho) {
    const int r = rho.rows;
    Jet z = zero_like(rho(0, 0));
    std::vector f(r, std::vector(r, std::vector<Jet>(r, z)));
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            auto w = bracket_jets(rho, i, j);
            // the bracket jets are one order below rho; shrink rho to match
            auto c = detail::frame_coefficients(rho, w);
            for (int kk = 0; kk < r; ++kk) {
                f[i][j][kk] = c[kk];
                f[j][i][kk] = -c[kk];
            }
        }
    return f;
}

// ---------------------------------------------------------------------------
// validation

struct SamplingPlan {
    int interior_samples = 50;
    int dyadic_min = 4;
    int dyadic_max = 24;
    int transverse_draws = 3;
    /// Corner-coordinate floor for the anchor-invertibility samples. Frames
    /// with exp(-1/x) entries underflow double precision below ~1/700 and
    /// would masquerade as rank-deficient.
    double anchor_floor = 1.0 / 256.0;
    double closure_tol = 1e-9;
    std::uint64_t seed = 1;
};

struct AxiomVerdict {
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    AxiomVerdict tangency;       // (T)
    AxiomVerdict closure;        // (C)
    AxiomVerdict smoothness;     // (S)
    AxiomVerdict invertibility;  // (I), only checked when rank == dim
    bool lie_structure_checked = false;
    bool all_pass() const {
        return tangency.pass && closure.pass && smoothness.pass &&
               (!lie_structure_checked || invertibility.pass);
    }
};

namespace detail {

inline ChartPoint random_interior_point(const Chart& c, Rng& rng, double corner_lo = 0.05,
                                        double corner_hi = 1.0) {
    ChartPoint p;
    p.x.resize(c.dim());
    for (int i = 0; i < c.dim(); ++i)
        p.x[i] = i < c.corner_codim() ? rng.uniform(corner_lo, corner_hi) : rng.uniform(-1.0, 1.0);
    return p;
}

/// Decreasing-trend test on a dyadic sample sequence: fit of log(max(v, eps))
/// against the dyadic level must have negative slope, unless the values are
/// already negligible.
inline bool decays_to_zero(const std::vector<double>& v, double negligible = 1e-12) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    if (mx < negligible) return true;
    // least squares slope of log|v_m| vs m (clamped away from -inf)
    double sm = 0, sy = 0, smm = 0, smy = 0;
    const int N = static_cast<int>(v.size());
    for (int m = 0; m < N; ++m) {
        double y = std::log(std::max(std::abs(v[m]), 1e-300));
        sm += m;
        sy += y;
        smm += static_cast<double>(m) * m;
        smy += m * y;
    }
    double slope = (N * smy - sm * sy) / (N * smm - sm * sm);
    return slope < -1e-3;
}

}  // namespace detail

/// Checks the structure axioms numerically: (T) face tangency by boundary
/// approach, (C) bracket closure residuals, (S) structure functions Cauchy
/// up to the boundary, (I) interior anchor invertibility (square frames).
inline ValidationReport validate(const Algebroid& a, const SamplingPlan& plan) {
    ValidationReport rep;
    Rng rng(plan.seed);
    const int r = static_cast<int>(a.rank), k = a.chart.corner_codim();
    char buf[160];

    // (T) for each face j: the j-th component of every frame field -> 0
    {
        bool ok = true;
        std::string msg;
        for (int face = 0; face < k && ok; ++face) {
            Rng sub = rng.fork();
            for (int i = 0; i < r && ok; ++i) {
                std::vector<double> vals;
                for (int m = plan.dyadic_min; m <= plan.dyadic_max; ++m) {
                    double worst = 0.0;
                    for (int t = 0; t < plan.transverse_draws; ++t) {
                        ChartPoint p = detail::random_interior_point(a.chart, sub);
                        p.x[face] = std::ldexp(1.0, -m);
                        worst = std::max(worst, std::abs(a.frame[i][face].value(p.x)));
                    }
                    vals.push_back(worst);
                }
                if (!detail::decays_to_zero(vals)) {
                    ok = false;
                    std::snprintf(buf, sizeof buf, "frame field %d not tangent to face %d", i + 1,
                                  face + 1);
                    msg = buf;
                }
            }
        }
        rep.tangency = {ok, ok ? "all frame fields tangent to all faces" : msg};
    }

    // (C) closure: structure-function residuals at random interior samples
    {
        double worst = 0.0;
        for (int s = 0; s < plan.interior_samples; ++s) {
            ChartPoint p = detail::random_interior_point(a.chart, rng, plan.anchor_floor);
            worst = std::max(worst, structure_functions(a, p).max_residual);
        }
        bool ok = worst <= plan.closure_tol;
        std::snprintf(buf, sizeof buf, "max bracket residual %.3e (tol %.1e)", worst,
                      plan.closure_tol);
        rep.closure = {ok, buf};
    }

    // (S) smoothness up to the boundary: f_ijk Cauchy along dyadic approach
    {
        bool ok = true;
        std::string msg = "structure functions Cauchy along boundary approach";
        for (int face = 0; face < k && ok; ++face) {
            Rng sub = rng.fork();
            ChartPoint base = detail::random_interior_point(a.chart, sub);
            std::vector<StructureFunctions> seq;
            for (int m = plan.dyadic_min; m <= plan.dyadic_max; ++m) {
                ChartPoint p = base;
                p.x[face] = std::ldexp(1.0, -m);
                // stop where the frame solve leaves double range (e.g.
                // exp(-1/x) rows underflow); the Cauchy test runs on the
                // representable prefix of the approach sequence
                auto sv = singular_values(anchor_matrix(a, p));
                double smin = sv[0];
                for (double s : sv) smin = std::min(smin, s);
                if (smin < 1e-250) break;
                seq.push_back(structure_functions(a, p));
            }
            // successive sup-differences must decay; values must stay bounded
            std::vector<double> diffs;
            double bound = 0.0;
            for (std::size_t m = 0; m + 1 < seq.size(); ++m) {
                double d = 0.0;
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < r; ++j)
                        for (int kk = 0; kk < r; ++kk) {
                            d = std::max(d, std::abs(seq[m + 1].f[i][j][kk] - seq[m].f[i][j][kk]));
                            bound = std::max(bound, std::abs(seq[m].f[i][j][kk]));
                        }
                diffs.push_back(d);
            }
            if (!detail::decays_to_zero(diffs, 1e-10) || !(bound < 1e6)) {
                ok = false;
                std::snprintf(buf, sizeof buf,
                              "structure functions not Cauchy at face %d (sup %.3e)", face + 1,
                              bound);
                msg = buf;
            }
        }
        rep.smoothness = {ok, msg};
    }

    // (I) anchor fiberwise invertible over the interior (square frames only)
    if (a.square()) {
        rep.lie_structure_checked = true;
        double worst_cond = 0.0;
        bool ok = true;
        for (int s = 0; s < plan.interior_samples && ok; ++s) {
            ChartPoint p = detail::random_interior_point(a.chart, rng, plan.anchor_floor);
            double c = cond_number(anchor_matrix(a, p));
            if (!std::isfinite(c)) ok = false;
            worst_cond = std::max(worst_cond, c);
        }
        std::snprintf(buf, sizeof buf, "max anchor condition number %.3e over interior samples",
                      worst_cond);
        rep.invertibility = {ok, ok ? buf : "anchor singular at an interior sample"};
    }

    return rep;
}

}  // namespace lsinf
