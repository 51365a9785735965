#pragma once

#include <array>
#include <complex>
#include <vector>

#include "lsinf/forms.hpp"
#include "lsinf/integrate.hpp"

namespace lsinf {

using C2 = std::complex<double>;

/// 2x2 complex matrix, enough for the rank-2/3 spinor representations.
struct Mat2c {
    std::array<C2, 4> m{};  // row-major

    C2& operator()(int i, int j) { return m[2 * i + j]; }
    const C2& operator()(int i, int j) const { return m[2 * i + j]; }

    friend Mat2c operator*(const Mat2c& a, const Mat2c& b) {
        Mat2c c;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
        return c;
    }
    friend Mat2c operator+(const Mat2c& a, const Mat2c& b) {
        Mat2c c;
        for (int i = 0; i < 4; ++i) c.m[i] = a.m[i] + b.m[i];
        return c;
    }
    friend Mat2c operator*(C2 s, const Mat2c& a) {
        Mat2c c;
        for (int i = 0; i < 4; ++i) c.m[i] = s * a.m[i];
        return c;
    }
    static Mat2c ident() {
        Mat2c c;
        c(0, 0) = c(1, 1) = 1.0;
        return c;
    }
    Mat2c adjoint() const {
        Mat2c c;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) c(i, j) = std::conj((*this)(j, i));
        return c;
    }
    std::array<C2, 2> apply(const std::array<C2, 2>& v) const {
        return {(*this)(0, 0) * v[0] + (*this)(0, 1) * v[1],
                (*this)(1, 0) * v[0] + (*this)(1, 1) * v[1]};
    }
};

/// Skew-adjoint generators with gamma_i gamma_j + gamma_j gamma_i = -2 delta_ij.
/// Entries are exactly 0, +-1, +-i.
struct CliffordRep {
    int rank = 0;
    int dim = 2;
    std::vector<Mat2c> gamma;
};

inline CliffordRep clifford_rep(int rank) {
    if (rank != 2 && rank != 3)
        throw std::invalid_argument("clifford_rep: supported ranks are 2 and 3");
    const C2 I(0.0, 1.0);
    Mat2c g1, g2, g3;
    g1(0, 0) = I;
    g1(1, 1) = -I;
    g2(0, 1) = 1.0;
    g2(1, 0) = -1.0;
    g3 = g1 * g2;  // [[0, i], [i, 0]]
    CliffordRep rep;
    rep.rank = rank;
    rep.gamma = {g1, g2};
    if (rank == 3) rep.gamma.push_back(g3);
    return rep;
}

/// Spinor field with expression components (real and imaginary parts).
struct SpinorField {
    std::vector<Expr> re, im;  // dim entries each

    static SpinorField constant(C2 a, C2 b) {
        SpinorField s;
        s.re = {Expr::number(a.real()), Expr::number(b.real())};
        s.im = {Expr::number(a.imag()), Expr::number(b.imag())};
        return s;
    }
};

namespace detail {

/// ehat_a applied to a scalar expression jet (value output).
inline double ortho_frame_apply(const FrameGeometry& fg, const OrthoFrame& of, int a,
                                const Jet& h) {
    double s = 0.0;
    for (int i = 0; i < fg.rank; ++i) s += of.C(a, i).value() * frame_apply(fg.rho, i, h).value();
    return s;
}

}  // namespace detail

/// Generalized Dirac operator on the spinor bundle:
///   D psi = sum_a gamma_a ( ehat_a(psi) + 1/4 sum_{b,c} Ghat_abc gamma_b gamma_c psi ),
/// with the frame orthonormalized pointwise and ehat acting through the
/// anchor. All coordinate access goes through frame_apply; the audit hooks
/// in the test suite rely on that.
inline std::array<C2, 2> dirac(const Algebroid& a, const MetricOnA& g, const CliffordRep& rep,
                               const SpinorField& psi, const ChartPoint& p) {
    if (static_cast<int>(a.rank) != rep.rank)
        throw std::invalid_argument("dirac: representation rank != structure rank");
    FrameGeometry fg = frame_geometry(a, g, p, 1);
    OrthoFrame of = orthonormal_frame(fg);
    const int r = rep.rank;
    std::array<Jet, 2> re_j = {psi.re[0].jet(p.x, 1), psi.re[1].jet(p.x, 1)};
    std::array<Jet, 2> im_j = {psi.im[0].jet(p.x, 1), psi.im[1].jet(p.x, 1)};
    std::array<C2, 2> psival = {C2(re_j[0].value(), im_j[0].value()),
                                C2(re_j[1].value(), im_j[1].value())};
    std::array<C2, 2> out{};
    for (int aa = 0; aa < r; ++aa) {
        // derivative part
        std::array<C2, 2> da;
        for (int t = 0; t < 2; ++t)
            da[t] = C2(detail::ortho_frame_apply(fg, of, aa, re_j[t]),
                       detail::ortho_frame_apply(fg, of, aa, im_j[t]));
        // spin connection part
        Mat2c sigma;
        for (int b = 0; b < r; ++b)
            for (int c = 0; c < r; ++c) {
                double coeff = of.gamma_hat.at({aa, b, c}).value();
                if (coeff != 0.0) sigma = sigma + (C2(0.25 * coeff, 0.0) * (rep.gamma[b] * rep.gamma[c]));
            }
        std::array<C2, 2> conn = sigma.apply(psival);
        std::array<C2, 2> total = {da[0] + conn[0], da[1] + conn[1]};
        std::array<C2, 2> mult = rep.gamma[aa].apply(total);
        out[0] += mult[0];
        out[1] += mult[1];
    }
    return out;
}

/// Smallest singular value of the principal symbol sum_a eta_a gamma_a with
/// eta the covector in the orthonormal coframe; equals |xi|_G exactly.
inline double symbol_sigma_min(const CliffordRep& rep, const MetricOnA& g, const ChartPoint& p,
                               const std::vector<double>& xi) {
    double nz = 0.0;
    for (double c : xi) nz += c * c;
    if (nz == 0.0) throw std::invalid_argument("symbol_sigma_min: zero covector");
    MatD G = metric_values(g, p);
    MatD L = cholesky(G);
    MatD C = inverse(L);
    // eta = C xi (covector components move with the inverse-transpose of the
    // frame change; C is lower triangular from the Cholesky of G)
    std::vector<double> eta(rep.rank, 0.0);
    for (int i = 0; i < rep.rank; ++i)
        for (int j = 0; j < rep.rank; ++j) eta[i] += C(i, j) * xi[j];
    Mat2c S;
    for (int i = 0; i < rep.rank; ++i) S = S + (C2(eta[i], 0.0) * rep.gamma[i]);
    Mat2c H = S.adjoint() * S;
    // hermitian 2x2 eigenvalues
    double tr = H(0, 0).real() + H(1, 1).real();
    double diff = H(0, 0).real() - H(1, 1).real();
    double off = std::abs(H(0, 1));
    double disc = std::sqrt(0.25 * diff * diff + off * off);
    double lam_min = 0.5 * tr - disc;
    return std::sqrt(std::max(lam_min, 0.0));
}

// ---------------------------------------------------------------------------
// the Clifford module W = Cl(A) = Lambda* A* in rank 2

/// Left Clifford multiplication on the 4-dimensional exterior algebra basis
/// (1, e^1, e^2, e^1^e^2): e_a . w = e^a ^ w - iota(e_a) w.
inline MatD clifford_left_mult_rank2(int aa) {
    MatD L(4, 4, 0.0);
    if (aa == 0) {
        L(1, 0) = 1.0;   // 1 -> e1
        L(0, 1) = -1.0;  // e1 -> -1
        L(3, 2) = 1.0;   // e2 -> e12
        L(2, 3) = -1.0;  // e12 -> -e2
    } else {
        L(2, 0) = 1.0;   // 1 -> e2
        L(3, 1) = -1.0;  // e1 -> -e12
        L(0, 2) = -1.0;  // e2 -> -1
        L(1, 3) = 1.0;   // e12 -> e1
    }
    return L;
}

/// Residual max |D_W(w) - (d + delta)(w)| over a list of mixed-degree
/// sections of Lambda* A*, rank 2. Components are given in the original
/// frame as (scalar; w_1, w_2; w_12). The left side runs through Clifford
/// matrices and the induced connection on Lambda*; the right side through
/// the independent deRham_d / codifferential paths.
inline double dirac_is_drham_residual(const Algebroid& a, const MetricOnA& g,
                                      const std::vector<std::array<Expr, 4>>& sections,
                                      const ChartPoint& p) {
    if (a.rank != 2) throw std::invalid_argument("dirac_is_drham: rank 2 only");
    FrameGeometry fg = frame_geometry(a, g, p, 2);
    OrthoFrame of = orthonormal_frame(fg);
    double worst = 0.0;
    for (const auto& sec : sections) {
        FormExpr w0{0, 2, {sec[0]}};
        FormExpr w1{1, 2, {sec[1], sec[2]}};
        FormExpr w2{2, 2, {sec[3]}};
        FormJets j0 = form_jets(w0, p, a.dim(), 2);
        FormJets j1 = form_jets(w1, p, a.dim(), 2);
        FormJets j2 = form_jets(w2, p, a.dim(), 2);

        // ----- right side: (d + delta) per graded piece, orthonormal comps
        FormJets d0 = deRham_d(fg, j0);           // degree 1
        FormJets d1 = deRham_d(fg, j1);           // degree 2
        FormJets del1 = codifferential(fg, of, j1);  // degree 0
        FormJets del2 = codifferential(fg, of, j2);  // degree 1
        FormJets rhs0 = del1;
        FormJets rhs1{1, 2, {d0.comp[0] + del2.comp[0], d0.comp[1] + del2.comp[1]}};
        FormJets rhs2 = d1;
        FormJets rhs0h = change_frame(rhs0, of.C);
        FormJets rhs1h = change_frame(rhs1, of.C);
        FormJets rhs2h = change_frame(rhs2, of.C);
        std::array<double, 4> rhs = {rhs0h.comp[0].value(), rhs1h.comp[0].value(),
                                     rhs1h.comp[1].value(), rhs2h.comp[0].value()};

        // ----- left side: D_W = sum_a L_a nablahat_a on orthonormal comps
        FormJets h0 = change_frame(j0, of.C);
        FormJets h1 = change_frame(j1, of.C);
        FormJets h2 = change_frame(j2, of.C);
        std::array<double, 4> lhs{};
        for (int aa = 0; aa < 2; ++aa) {
            // nablahat_a of each graded component
            std::array<double, 4> nab{};
            nab[0] = detail::ortho_frame_apply(fg, of, aa, h0.comp[0]);
            for (int b = 0; b < 2; ++b) {
                double v = detail::ortho_frame_apply(fg, of, aa, h1.comp[b]);
                for (int c = 0; c < 2; ++c)
                    v -= of.gamma_hat.at({aa, b, c}).value() * h1.comp[c].value();
                nab[1 + b] = v;
            }
            nab[3] = detail::ortho_frame_apply(fg, of, aa, h2.comp[0]);  // volume form parallel
            MatD L = clifford_left_mult_rank2(aa);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) lhs[i] += L(i, j) * nab[j];
        }
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
    }
    return worst;
}

/// Quadrature check of (D psi1, psi2) = (psi1, D psi2) for bump-supported
/// spinor fields.
struct SelfadjointnessResult {
    C2 lhs, rhs;
    double norm1 = 0.0, norm2 = 0.0;
    double residual = 0.0;
};

inline SelfadjointnessResult selfadjointness_check(const Algebroid& a, const MetricOnA& g,
                                                   const CliffordRep& rep, const SpinorField& psi1,
                                                   const SpinorField& psi2, const Box& support,
                                                   int cells) {
    if (cells < 16) throw std::invalid_argument("selfadjointness_check: grid too coarse");
    SelfadjointnessResult out;
    auto value = [&](const SpinorField& s, const ChartPoint& p) {
        return std::array<C2, 2>{C2(s.re[0].value(p.x), s.im[0].value(p.x)),
                                 C2(s.re[1].value(p.x), s.im[1].value(p.x))};
    };
    C2 lhs = 0.0, rhs = 0.0;
    double n1 = 0.0, n2 = 0.0;
    double total = midpoint_integrate(support, cells, [&](const ChartPoint& p) {
        double mu = volume_density(a, g, p);
        auto d1 = dirac(a, g, rep, psi1, p);
        auto d2 = dirac(a, g, rep, psi2, p);
        auto v1 = value(psi1, p);
        auto v2 = value(psi2, p);
        lhs += mu * (d1[0] * std::conj(v2[0]) + d1[1] * std::conj(v2[1]));
        rhs += mu * (v1[0] * std::conj(d2[0]) + v1[1] * std::conj(d2[1]));
        n1 += mu * (std::norm(v1[0]) + std::norm(v1[1]));
        n2 += mu * (std::norm(v2[0]) + std::norm(v2[1]));
        return 0.0;
    });
    (void)total;
    // midpoint cell volume factored into all four accumulators identically
    const int n = support.dim();
    double cell = support.measure() / std::pow(static_cast<double>(cells), n);
    out.lhs = lhs * cell;
    out.rhs = rhs * cell;
    out.norm1 = std::sqrt(n1 * cell);
    out.norm2 = std::sqrt(n2 * cell);
    double denom = out.norm1 * out.norm2;
    out.residual = denom > 0.0 ? std::abs(out.lhs - out.rhs) / denom : 0.0;
    return out;
}

}  // namespace lsinf
