#pragma once

#include <array>
#include <string>
#include <vector>

#include "lsinf/metric.hpp"

namespace lsinf {

/// Small dense tensor, row-major over `shape`.
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    static Tensor filled(std::vector<int> sh, const T& fill) {
        Tensor t;
        t.shape = std::move(sh);
        std::size_t total = 1;
        for (int d : t.shape) total *= static_cast<std::size_t>(d);
        t.data.assign(total, fill);
        return t;
    }

    std::size_t flat(std::initializer_list<int> idx) const {
        std::size_t f = 0;
        auto it = idx.begin();
        for (std::size_t d = 0; d < shape.size(); ++d, ++it) f = f * shape[d] + *it;
        return f;
    }
    std::size_t flat_v(const std::vector<int>& idx) const {
        std::size_t f = 0;
        for (std::size_t d = 0; d < shape.size(); ++d) f = f * shape[d] + idx[d];
        return f;
    }
    T& at(std::initializer_list<int> idx) { return data[flat(idx)]; }
    const T& at(std::initializer_list<int> idx) const { return data[flat(idx)]; }

    std::vector<int> unflatten(std::size_t f) const {
        std::vector<int> idx(shape.size());
        for (std::size_t d = shape.size(); d-- > 0;) {
            idx[d] = static_cast<int>(f % shape[d]);
            f /= shape[d];
        }
        return idx;
    }

    double sup_norm() const {
        double s = 0.0;
        for (const T& v : data) s = std::max(s, std::abs(value_of(v)));
        return s;
    }
};

/// Jets of everything the Koszul formula needs at one point, at a common
/// differentiation order: anchor, Gram matrix and its inverse, structure
/// functions, and the frame Christoffel coefficients
///   nabla_{X_i} X_j = sum_k gamma(i,j,k) X_k,  gamma_low(i,j,k) = <nabla_{X_i}X_j, X_k>.
struct FrameGeometry {
    int rank = 0;
    int order = 0;  // order of the gamma jets
    bool identity_metric = false;
    Mat<Jet> rho;   // order + 1
    Mat<Jet> G;     // order + 1
    Mat<Jet> G_inv;
    std::vector<std::vector<std::vector<Jet>>> f;  // structure functions, order
    Tensor<Jet> gamma_low;
    Tensor<Jet> gamma;
};

/// Koszul formula in the frame:
/// 2 Gamma_ijk = X_i G_jk + X_j G_ki - X_k G_ij
///             + <[X_i,X_j],X_k> - <[X_j,X_k],X_i> + <[X_k,X_i],X_j>.
inline FrameGeometry frame_geometry(const Algebroid& a, const MetricOnA& g, const ChartPoint& p,
                                    int order) {
    if (!a.chart.is_interior(p)) throw std::domain_error("frame_geometry: point not interior");
    FrameGeometry fg;
    fg.rank = static_cast<int>(a.rank);
    fg.order = order;
    fg.identity_metric = g.is_identity;
    const int r = fg.rank;
    fg.rho = anchor_jets(a, p, order + 1);
    fg.G = metric_jets(g, p, a.dim(), order + 1);
    fg.f = structure_function_jets(fg.rho);

    // X_i G_jk through the anchor
    Jet z = Jet::constant(JetSpace::get(a.dim(), order), 0.0);
    auto XG = Tensor<Jet>::filled({r, r, r}, z);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = j; k < r; ++k) {
                Jet v = frame_apply(fg.rho, i, fg.G(j, k));
                XG.at({i, j, k}) = v;
                XG.at({i, k, j}) = v;
            }

    auto inner_f = [&](int i, int j, int k) {  // <[X_i,X_j], X_k>
        Jet s = fg.f[i][j][0] * fg.G(0, k);
        for (int m = 1; m < r; ++m) s = s + fg.f[i][j][m] * fg.G(m, k);
        return s;
    };

    fg.gamma_low = Tensor<Jet>::filled({r, r, r}, z);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                Jet two_gamma = XG.at({i, j, k}) + XG.at({j, k, i}) - XG.at({k, i, j}) +
                                inner_f(i, j, k) - inner_f(j, k, i) + inner_f(k, i, j);
                fg.gamma_low.at({i, j, k}) = two_gamma * 0.5;
            }

    fg.G_inv = inverse(fg.G);
    fg.gamma = Tensor<Jet>::filled({r, r, r}, z);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            for (int k = 0; k < r; ++k) {
                Jet s = fg.gamma_low.at({i, j, 0}) * fg.G_inv(0, k);
                for (int l = 1; l < r; ++l) s = s + fg.gamma_low.at({i, j, l}) * fg.G_inv(l, k);
                fg.gamma.at({i, j, k}) = s;
            }
    return fg;
}

/// Point values of the connection (convenience wrapper).
struct ConnectionData {
    Tensor<double> gamma;      // gamma(i,j,k) = Gamma^k_ij
    Tensor<double> gamma_low;  // Gamma_ijk
};

inline ConnectionData koszul(const Algebroid& a, const MetricOnA& g, const ChartPoint& p) {
    FrameGeometry fg = frame_geometry(a, g, p, 0);
    const int r = fg.rank;
    ConnectionData c{Tensor<double>::filled({r, r, r}, 0.0), Tensor<double>::filled({r, r, r}, 0.0)};
    for (std::size_t i = 0; i < fg.gamma.data.size(); ++i) {
        c.gamma.data[i] = fg.gamma.data[i].value();
        c.gamma_low.data[i] = fg.gamma_low.data[i].value();
    }
    return c;
}

/// R^l_kij = X_i(G^l_jk) - X_j(G^l_ik)
///         + sum_m (G^m_jk G^l_im - G^m_ik G^l_jm - f_ij^m G^l_mk),
/// stored as R.at({l,k,i,j}); jet order = geometry order - 1.
inline Tensor<Jet> curvature_jets(const FrameGeometry& fg) {
    const int r = fg.rank;
    if (fg.order < 1) throw std::invalid_argument("curvature_jets: need gamma jets of order >= 1");
    Jet z = Jet::constant(JetSpace::get(fg.rho.cols, fg.order - 1), 0.0);
    auto R = Tensor<Jet>::filled({r, r, r, r}, z);
    for (int l = 0; l < r; ++l)
        for (int k = 0; k < r; ++k)
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) {
                    Jet acc = frame_apply(fg.rho, i, fg.gamma.at({j, k, l})) -
                              frame_apply(fg.rho, j, fg.gamma.at({i, k, l}));
                    for (int m = 0; m < r; ++m)
                        acc = acc + fg.gamma.at({j, k, m}) * fg.gamma.at({i, m, l}) -
                              fg.gamma.at({i, k, m}) * fg.gamma.at({j, m, l}) -
                              fg.f[i][j][m] * fg.gamma.at({m, k, l});
                    R.at({l, k, i, j}) = acc;
                }
    return R;
}

inline Tensor<double> curvature(const Algebroid& a, const MetricOnA& g, const ChartPoint& p) {
    FrameGeometry fg = frame_geometry(a, g, p, 1);
    Tensor<Jet> R = curvature_jets(fg);
    Tensor<double> out = Tensor<double>::filled(R.shape, 0.0);
    for (std::size_t i = 0; i < R.data.size(); ++i) out.data[i] = R.data[i].value();
    return out;
}

/// Covariant derivative of a frame tensor; prepends one lower index:
/// (nabla T)_{m,I} = X_m(T_I) + sum_{s upper} Gamma^{I_s}_{m c} T_{I_s -> c}
///                          - sum_{s lower} Gamma^{c}_{m I_s} T_{I_s -> c}.
inline Tensor<Jet> covariant_derivative(const Tensor<Jet>& t, const std::vector<bool>& is_upper,
                                        const FrameGeometry& fg) {
    const int r = fg.rank;
    std::vector<int> shape = t.shape;
    shape.insert(shape.begin(), r);
    Jet z = zero_like(t.data[0].partial(0));
    auto out = Tensor<Jet>::filled(shape, z);
    for (std::size_t fidx = 0; fidx < t.data.size(); ++fidx) {
        std::vector<int> I = t.unflatten(fidx);
        for (int m = 0; m < r; ++m) {
            Jet acc = frame_apply(fg.rho, m, t.data[fidx]);
            std::vector<int> J = I;
            for (std::size_t s = 0; s < I.size(); ++s) {
                for (int c = 0; c < r; ++c) {
                    J[s] = c;
                    const Jet& tc = t.data[t.flat_v(J)];
                    if (is_upper[s])
                        acc = acc + fg.gamma.at({m, c, I[s]}) * tc;
                    else
                        acc = acc - fg.gamma.at({m, I[s], c}) * tc;
                }
                J[s] = I[s];
            }
            std::vector<int> O = I;
            O.insert(O.begin(), m);
            out.data[out.flat_v(O)] = acc;
        }
    }
    return out;
}

/// nabla^k R as point values; k extra leading lower indices, k <= 2.
inline Tensor<double> nabla_k_curvature(const Algebroid& a, const MetricOnA& g, const ChartPoint& p,
                                        int k) {
    if (k < 0 || k > 2) throw std::invalid_argument("nabla_k_curvature: supported k = 0, 1, 2");
    FrameGeometry fg = frame_geometry(a, g, p, k + 1);
    Tensor<Jet> cur = curvature_jets(fg);  // order k
    std::vector<bool> var = {true, false, false, false};
    for (int step = 0; step < k; ++step) {
        cur = covariant_derivative(cur, var, fg);
        var.insert(var.begin(), false);
    }
    Tensor<double> out = Tensor<double>::filled(cur.shape, 0.0);
    for (std::size_t i = 0; i < cur.data.size(); ++i) out.data[i] = cur.data[i].value();
    return out;
}

// ---------------------------------------------------------------------------
// orthonormal frame and divergence

/// Pointwise G-orthonormalization e-hat_a = sum_i C(a,i) X_i via Cholesky,
/// with the inverse change L = C^{-1} (so X_i = sum_a L(i,a) e-hat_a), and
/// the orthonormal-frame connection coefficients
///   Ghat(a,b,c) = <nabla_{ehat_a} ehat_b, ehat_c>   (skew in b,c).
struct OrthoFrame {
    Mat<Jet> C;
    Mat<Jet> L;
    Tensor<Jet> gamma_hat;
};

inline OrthoFrame orthonormal_frame(const FrameGeometry& fg) {
    OrthoFrame of;
    const int r = fg.rank;
    if (fg.identity_metric) {
        // frame already orthonormal: C = L = Id, Ghat = lowered gamma
        Jet one = one_like(fg.G(0, 0)), zero = zero_like(fg.G(0, 0));
        of.L = Mat<Jet>(r, r, zero);
        for (int i = 0; i < r; ++i) of.L(i, i) = one;
        of.C = of.L;
        of.gamma_hat = fg.gamma_low;
        return of;
    }
    of.L = cholesky(fg.G);
    of.C = inverse(of.L);
    Jet z = Jet::constant(JetSpace::get(fg.rho.cols, std::max(fg.order - 1, 0)), 0.0);
    of.gamma_hat = Tensor<Jet>::filled({r, r, r}, z);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            for (int c = 0; c < r; ++c) {
                Jet acc = z;
                for (int i = 0; i < r; ++i) {
                    for (int j = 0; j < r; ++j) {
                        // C_ai (X_i C_bj) L_jc
                        acc = acc + of.C(a, i) * frame_apply(fg.rho, i, of.C(b, j)) * of.L(j, c);
                        for (int kk = 0; kk < r; ++kk)
                            acc = acc + of.C(a, i) * of.C(b, j) * fg.gamma.at({i, j, kk}) *
                                            of.L(kk, c);
                    }
                }
                of.gamma_hat.at({a, b, c}) = acc;
            }
    return of;
}

/// Divergence with the sign convention div(X) = -sum_a c_aa where
/// nabla_{ehat_a} X = sum_b c_ab ehat_b; this is the negative of the
/// classical divergence and makes the formal adjoint of X equal
/// -X + div(X).
inline double divergence(const Algebroid& a, const MetricOnA& g, const std::vector<Expr>& coeffs,
                         const ChartPoint& p) {
    if (coeffs.size() != a.rank) throw std::invalid_argument("divergence: wrong coefficient count");
    FrameGeometry fg = frame_geometry(a, g, p, 1);
    OrthoFrame of = orthonormal_frame(fg);
    const int r = fg.rank;
    // components of X in the orthonormal frame: u_a = sum_i c_i L(i,a)
    std::vector<Jet> u;
    u.reserve(r);
    for (int aa = 0; aa < r; ++aa) {
        Jet s = coeffs[0].jet(p.x, 1) * of.L(0, aa);
        for (int i = 1; i < r; ++i) s = s + coeffs[i].jet(p.x, 1) * of.L(i, aa);
        u.push_back(s);
    }
    double div = 0.0;
    for (int aa = 0; aa < r; ++aa) {
        // c_aa = ehat_a(u_a) + sum_c u_c Ghat(a,c,a)
        double ehat_u = 0.0;
        for (int i = 0; i < r; ++i)
            ehat_u += of.C(aa, i).value() * frame_apply(fg.rho, i, u[aa]).value();
        double corr = 0.0;
        for (int c = 0; c < r; ++c) corr += u[c].value() * of.gamma_hat.at({aa, c, aa}).value();
        div -= ehat_u + corr;
    }
    return div;
}

// ---------------------------------------------------------------------------
// coordinate-picture oracle

/// Classical Christoffel symbols of the induced interior metric, computed
/// directly from coordinate jets of g: the brute-force cross-check of the
/// frame computation. Returns Gamma.at({a,b,c}) = Gamma^c_ab.
inline Tensor<double> coordinate_christoffels(const Algebroid& a, const MetricOnA& g,
                                              const ChartPoint& p) {
    const int n = a.dim();
    Mat<Jet> gJ = induced_metric_jets(a, g, p, 1);
    MatD gv(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gv(i, j) = gJ(i, j).value();
    MatD ginv = inverse(gv);
    auto out = Tensor<double>::filled({n, n, n}, 0.0);
    for (int aa = 0; aa < n; ++aa)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int d = 0; d < n; ++d)
                    s += ginv(c, d) * (gJ(b, d).deriv1(aa) + gJ(aa, d).deriv1(b) -
                                       gJ(aa, b).deriv1(d));
                out.at({aa, b, c}) = 0.5 * s;
            }
    return out;
}

/// The frame connection pushed through the anchor to coordinate Christoffels:
/// Gamma^c_ab = sum_j (d_a B_bj) rho_jc + sum_{ijk} B_ai B_bj Gamma^k_ij rho_kc,
/// with B = rho^{-1}. Must agree with coordinate_christoffels on the interior.
inline Tensor<double> frame_christoffels_pushed(const Algebroid& a, const MetricOnA& g,
                                                const ChartPoint& p) {
    if (!a.square()) throw std::domain_error("frame_christoffels_pushed: rank != dim");
    const int n = a.dim();
    FrameGeometry fg = frame_geometry(a, g, p, 1);
    Mat<Jet> B = inverse(fg.rho);
    auto out = Tensor<double>::filled({n, n, n}, 0.0);
    for (int aa = 0; aa < n; ++aa)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += B(b, j).deriv1(aa) * fg.rho(j, c).value();
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k)
                            s += B(aa, i).value() * B(b, j).value() *
                                 fg.gamma.at({i, j, k}).value() * fg.rho(k, c).value();
                out.at({aa, b, c}) = s;
            }
    return out;
}

// ---------------------------------------------------------------------------
// boundedness probe

enum class CurvatureQuantity { R, NablaR, Nabla2R };

inline const char* quantity_name(CurvatureQuantity q) {
    switch (q) {
        case CurvatureQuantity::R: return "R";
        case CurvatureQuantity::NablaR: return "nablaR";
        case CurvatureQuantity::Nabla2R: return "nabla2R";
    }
    return "?";
}

struct ProbeSample {
    int level = 0;  // x_face = 2^-level
    double norm = 0.0;
};

struct BoundednessReport {
    CurvatureQuantity quantity;
    int face = 0;
    std::vector<ProbeSample> samples;
    double max_norm = 0.0;
    double slope = 0.0;  // fitted slope of log norm vs dyadic level
    int deepest_level = 0;
    bool bounded = false;
};

/// Sup-norm of frame curvature components along a dyadic approach to a face;
/// "bounded" verdict when the fitted log-slope stays below 0.01. The sweep
/// stops where the frame leaves double range (see SamplingPlan::anchor_floor
/// discussion); `deepest_level` records how far it got.
inline BoundednessReport boundedness_probe(const Algebroid& a, const MetricOnA& g,
                                           CurvatureQuantity q, int face, Rng& rng,
                                           int level_min = 2, int level_max = 24,
                                           int transverse_draws = 2) {
    if (face < 1 || face > a.chart.corner_codim())
        throw std::out_of_range("boundedness_probe: invalid face index");
    BoundednessReport rep;
    rep.quantity = q;
    rep.face = face;
    const int korder = q == CurvatureQuantity::R ? 0 : (q == CurvatureQuantity::NablaR ? 1 : 2);
    for (int m = level_min; m <= level_max; ++m) {
        double worst = 0.0;
        bool representable = true;
        for (int t = 0; t < transverse_draws; ++t) {
            Rng sub = rng.fork();
            ChartPoint p = detail::random_interior_point(a.chart, sub, 0.3, 0.9);
            p.x[face - 1] = std::ldexp(1.0, -m);
            auto sv = singular_values(anchor_matrix(a, p));
            double smin = sv[0];
            for (double s : sv) smin = std::min(smin, s);
            if (smin < 1e-250) {
                representable = false;
                break;
            }
            worst = std::max(worst, nabla_k_curvature(a, g, p, korder).sup_norm());
        }
        if (!representable) break;
        rep.samples.push_back({m, worst});
        rep.deepest_level = m;
        rep.max_norm = std::max(rep.max_norm, worst);
    }
    // slope of log norm vs level over the sampled range
    double sm = 0, sy = 0, smm = 0, smy = 0;
    int N = 0;
    for (const auto& s : rep.samples) {
        double y = std::log(std::max(s.norm, 1e-300));
        sm += s.level;
        sy += y;
        smm += static_cast<double>(s.level) * s.level;
        smy += s.level * y;
        ++N;
    }
    rep.slope = N >= 2 ? (N * smy - sm * sy) / (N * smm - sm * sm) : 0.0;
    rep.bounded = rep.max_norm < 1e-9 || rep.slope <= 0.01;
    return rep;
}

}  // namespace lsinf
