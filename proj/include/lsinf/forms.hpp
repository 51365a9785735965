#pragma once

#include <vector>

#include "lsinf/connection.hpp"

namespace lsinf {

/// Canonical q-element subsets of {0..r-1} in lexicographic order.
inline std::vector<std::vector<int>> form_tuples(int r, int q) {
    std::vector<std::vector<int>> out;
    if (q == 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> t(q);
    for (int i = 0; i < q; ++i) t[i] = i;
    while (true) {
        if (t[0] > r - q) break;
        out.push_back(t);
        int pos = q - 1;
        while (pos >= 0 && t[pos] == r - q + pos) --pos;
        if (pos < 0) break;
        ++t[pos];
        for (int i = pos + 1; i < q; ++i) t[i] = t[i - 1] + 1;
    }
    return out;
}

/// Sign of sorting `idx` (0 for repeated indices); `sorted` receives the
/// ascending tuple.
inline int sort_sign(std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            if (idx[i] == idx[j]) return 0;
            if (idx[i] > idx[j]) {
                std::swap(idx[i], idx[j]);
                sign = -sign;
            }
        }
    return sign;
}

/// Degree-q form on the frame, components as expressions over the chart for
/// the canonical ascending index tuples.
struct FormExpr {
    int degree = 0;
    int rank = 0;
    std::vector<Expr> comp;

    static FormExpr zero(int rank, int degree) {
        FormExpr w;
        w.rank = rank;
        w.degree = degree;
        w.comp.assign(form_tuples(rank, degree).size(), Expr::number(0.0));
        return w;
    }
};

/// Same form with jet-valued components at a point.
struct FormJets {
    int degree = 0;
    int rank = 0;
    std::vector<Jet> comp;

    /// Component for an arbitrary index tuple, antisymmetrized.
    Jet value_at(std::vector<int> idx) const {
        int sign = sort_sign(idx);
        if (sign == 0) return zero_like(comp[0]);
        const auto tuples = form_tuples(rank, degree);
        for (std::size_t c = 0; c < tuples.size(); ++c)
            if (tuples[c] == idx) return sign > 0 ? comp[c] : -comp[c];
        throw std::logic_error("FormJets: tuple lookup failed");
    }
};

inline FormJets form_jets(const FormExpr& w, const ChartPoint& p, int nvars, int order) {
    FormJets out;
    out.degree = w.degree;
    out.rank = w.rank;
    out.comp.reserve(w.comp.size());
    for (const Expr& e : w.comp) {
        (void)nvars;
        out.comp.push_back(e.jet(p.x, order));
    }
    return out;
}

/// Algebroid de Rham differential, assembled from frame derivatives and
/// structure functions:
/// (dw)(X_{j0},..,X_{jq}) = sum_a (-1)^a X_{ja}( w(.. ^ja ..) )
///   + sum_{a<b} (-1)^{a+b} w([X_{ja},X_{jb}], .. ^ja .. ^jb ..).
/// Output jets are one order lower.
inline FormJets deRham_d(const FrameGeometry& fg, const FormJets& w) {
    const int r = fg.rank;
    if (w.degree >= r) throw std::invalid_argument("deRham_d: degree overflow");
    FormJets out;
    out.degree = w.degree + 1;
    out.rank = r;
    const auto tuples = form_tuples(r, out.degree);
    out.comp.reserve(tuples.size());
    for (const auto& J : tuples) {
        Jet acc = zero_like(w.comp[0].partial(0));
        for (std::size_t a = 0; a < J.size(); ++a) {
            std::vector<int> rest;
            for (std::size_t b = 0; b < J.size(); ++b)
                if (b != a) rest.push_back(J[b]);
            Jet term = frame_apply(fg.rho, J[a], w.value_at(rest));
            acc = (a % 2 == 0) ? acc + term : acc - term;
        }
        for (std::size_t a = 0; a < J.size(); ++a)
            for (std::size_t b = a + 1; b < J.size(); ++b) {
                std::vector<int> rest;
                for (std::size_t c = 0; c < J.size(); ++c)
                    if (c != a && c != b) rest.push_back(J[c]);
                Jet term = zero_like(acc);
                for (int m = 0; m < r; ++m) {
                    std::vector<int> idx;
                    idx.push_back(m);
                    idx.insert(idx.end(), rest.begin(), rest.end());
                    term = term + fg.f[J[a]][J[b]][m] * w.value_at(idx);
                }
                acc = ((a + b) % 2 == 0) ? acc + term : acc - term;
            }
        out.comp.push_back(acc);
    }
    return out;
}

/// Change of frame on components: new_{a1..aq} = sum M(a1,i1)..M(aq,iq) old_{i..}.
inline FormJets change_frame(const FormJets& w, const Mat<Jet>& M) {
    FormJets out;
    out.degree = w.degree;
    out.rank = w.rank;
    const auto tuples = form_tuples(w.rank, w.degree);
    out.comp.reserve(tuples.size());
    for (const auto& A : tuples) {
        if (w.degree == 0) {
            out.comp.push_back(w.comp[0]);
            continue;
        }
        Jet acc = zero_like(w.comp[0]) * M(0, 0);  // order alignment
        std::vector<int> I(w.degree, 0);
        for (;;) {
            Jet prod = w.value_at(I);
            for (int s = 0; s < w.degree; ++s) prod = prod * M(A[s], I[s]);
            acc = acc + prod;
            int d = w.degree - 1;
            while (d >= 0 && ++I[d] == w.rank) I[d--] = 0;
            if (d < 0) break;
        }
        out.comp.push_back(acc);
    }
    return out;
}

/// Codifferential via the orthonormal-frame contraction formula
/// delta w = -sum_a iota(ehat_a) nabla_{ehat_a} w; input and output are in
/// the original frame, the orthonormalization is internal.
inline FormJets codifferential(const FrameGeometry& fg, const OrthoFrame& of, const FormJets& w) {
    const int r = fg.rank;
    if (w.degree < 1) throw std::invalid_argument("codifferential: degree underflow");
    FormJets what = change_frame(w, of.C);
    FormJets out_hat;
    out_hat.degree = w.degree - 1;
    out_hat.rank = r;
    const auto tuples = form_tuples(r, out_hat.degree);
    out_hat.comp.reserve(tuples.size());
    for (const auto& B : tuples) {
        Jet acc = zero_like(w.comp[0].partial(0));
        for (int aa = 0; aa < r; ++aa) {
            std::vector<int> full;
            full.push_back(aa);
            full.insert(full.end(), B.begin(), B.end());
            // ehat_a(what(full))
            Jet nab = zero_like(acc);
            {
                Jet comp = what.value_at(full);
                for (int i = 0; i < r; ++i)
                    nab = nab + of.C(aa, i) * frame_apply(fg.rho, i, comp);
            }
            // - sum_slots Ghat corrections
            for (std::size_t s = 0; s < full.size(); ++s) {
                std::vector<int> mod = full;
                for (int c = 0; c < r; ++c) {
                    mod[s] = c;
                    nab = nab - of.gamma_hat.at({aa, full[s], c}) * what.value_at(mod);
                }
            }
            acc = acc - nab;
        }
        out_hat.comp.push_back(acc);
    }
    return change_frame(out_hat, of.L);
}

/// delta d + d delta with order-2 jets of the components.
inline std::vector<double> hodge_laplacian(const Algebroid& a, const MetricOnA& g,
                                           const FormExpr& w, const ChartPoint& p) {
    FrameGeometry fg = frame_geometry(a, g, p, 2);
    OrthoFrame of = orthonormal_frame(fg);
    FormJets wj = form_jets(w, p, a.dim(), 2);
    FormJets dd = deRham_d(fg, wj);            // order 1
    FormJets delta_d = codifferential(fg, of, dd);
    std::vector<double> out(delta_d.comp.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = delta_d.comp[i].value();
    if (w.degree >= 1) {
        FormJets del = codifferential(fg, of, wj);  // order 1
        FormJets d_delta = deRham_d(fg, del);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += d_delta.comp[i].value();
    }
    return out;
}

/// Pointwise inner product of two equal-degree forms (orthonormal-frame
/// component sum).
inline double form_inner(const OrthoFrame& of, const FormJets& u, const FormJets& v) {
    FormJets uh = change_frame(u, of.C), vh = change_frame(v, of.C);
    double s = 0.0;
    for (std::size_t c = 0; c < uh.comp.size(); ++c) s += uh.comp[c].value() * vh.comp[c].value();
    return s;
}

}  // namespace lsinf
