#pragma once

#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "lsinf/multiindex.hpp"

namespace lsinf {

struct eval_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncated multivariate Taylor expansion of a scalar field at a point.
/// Coefficients are stored in Taylor normalization (d^alpha f / alpha!), so
/// multiplication is a plain truncated convolution; deriv() rescales back to
/// raw partial derivatives. Binary operations between jets of different
/// orders truncate to the lower order, which keeps chained computations
/// (e.g. derivatives of derived quantities) correct without bookkeeping.
class Jet {
public:
    Jet() : space_(nullptr) {}

    static Jet constant(const JetSpace& sp, double c) {
        Jet j(sp);
        j.c_[0] = c;
        return j;
    }

    /// The coordinate function x_var as a jet at value `x`.
    static Jet variable(const JetSpace& sp, int var, double x) {
        Jet j(sp);
        j.c_[0] = x;
        if (sp.order() >= 1) {
            std::vector<int> alpha(sp.nvars(), 0);
            alpha[var] = 1;
            j.c_[sp.rank(alpha)] = 1.0;
        }
        return j;
    }

    const JetSpace& space() const { return *space_; }
    int order() const { return space_->order(); }
    int nvars() const { return space_->nvars(); }
    double value() const { return c_[0]; }

    double coef(std::size_t i) const { return c_[i]; }

    /// Raw partial derivative d^alpha f(p).
    double deriv(const std::vector<int>& alpha) const {
        int r = space_->rank(alpha);
        if (r < 0) throw std::out_of_range("Jet::deriv: |alpha| exceeds jet order");
        return c_[r] * space_->factorial(r);
    }

    /// First partial d_var f(p); requires order >= 1.
    double deriv1(int var) const {
        std::vector<int> alpha(space_->nvars(), 0);
        alpha[var] = 1;
        return deriv(alpha);
    }

    /// Jet of d_var f, one order lower.
    Jet partial(int var) const {
        if (order() < 1) throw std::out_of_range("Jet::partial: order 0 jet");
        const JetSpace& sp = JetSpace::get(nvars(), order() - 1);
        Jet out(sp);
        for (std::size_t i = 0; i < sp.size(); ++i) {
            std::vector<int> alpha = sp.index(i);
            alpha[var] += 1;
            int r = space_->rank(alpha);
            out.c_[i] = c_[r] * (alpha[var]);
        }
        return out;
    }

    Jet operator-() const {
        Jet out = *this;
        for (double& x : out.c_) x = -x;
        return out;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        auto [lo, hiA, hiB] = Jet::align(a, b);
        Jet out(*lo);
        for (std::size_t i = 0; i < lo->size(); ++i) out.c_[i] = hiA->lookup(*lo, i) + hiB->lookup(*lo, i);
        return out;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        auto [lo, hiA, hiB] = Jet::align(a, b);
        Jet out(*lo);
        for (std::size_t i = 0; i < lo->size(); ++i) out.c_[i] = hiA->lookup(*lo, i) - hiB->lookup(*lo, i);
        return out;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        auto [lo, hiA, hiB] = Jet::align(a, b);
        Jet out(*lo);
        // truncated convolution; both operands reduced to the result space
        Jet ra = hiA->truncate(*lo), rb = hiB->truncate(*lo);
        for (std::size_t i = 0; i < lo->size(); ++i) {
            if (ra.c_[i] == 0.0) continue;
            for (std::size_t j = 0; j < lo->size(); ++j) {
                int r = lo->rank_of_sum(i, j);
                if (r >= 0) out.c_[r] += ra.c_[i] * rb.c_[j];
            }
        }
        return out;
    }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }

    friend Jet operator+(const Jet& a, double s) {
        Jet out = a;
        out.c_[0] += s;
        return out;
    }
    friend Jet operator+(double s, const Jet& a) { return a + s; }
    friend Jet operator-(const Jet& a, double s) { return a + (-s); }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }
    friend Jet operator*(const Jet& a, double s) {
        Jet out = a;
        for (double& x : out.c_) x *= s;
        return out;
    }
    friend Jet operator*(double s, const Jet& a) { return a * s; }
    friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
    friend Jet operator/(double s, const Jet& a) { return recip(a) * s; }

    friend Jet recip(const Jet& u) {
        double u0 = u.value();
        if (u0 == 0.0) throw eval_error("division by zero");
        std::vector<double> phi(u.order() + 1);
        double p = 1.0 / u0;
        for (int k = 0; k <= u.order(); ++k) {
            phi[k] = p;
            p *= -1.0 / u0;
        }
        return u.compose(phi);
    }

    friend Jet exp(const Jet& u) {
        std::vector<double> phi(u.order() + 1);
        double e = std::exp(u.value());
        double fact = 1.0;
        for (int k = 0; k <= u.order(); ++k) {
            phi[k] = e / fact;
            fact *= (k + 1);
        }
        return u.compose(phi);
    }

    friend Jet log(const Jet& u) {
        double u0 = u.value();
        if (!(u0 > 0.0)) throw eval_error("log of non-positive value");
        std::vector<double> phi(u.order() + 1);
        phi[0] = std::log(u0);
        double p = 1.0 / u0;
        for (int k = 1; k <= u.order(); ++k) {
            phi[k] = p / k;
            p *= -1.0 / u0;
        }
        return u.compose(phi);
    }

    friend Jet sqrt(const Jet& u) {
        double u0 = u.value();
        if (!(u0 > 0.0)) throw eval_error("sqrt of non-positive value");
        std::vector<double> phi(u.order() + 1);
        phi[0] = std::sqrt(u0);
        // d^k sqrt = (1/2)(1/2-1)...(1/2-k+1) u0^(1/2-k)
        double coef = phi[0];
        for (int k = 1; k <= u.order(); ++k) {
            coef *= (0.5 - (k - 1)) / (k * u0);
            phi[k] = coef;
        }
        return u.compose(phi);
    }

    friend Jet sin(const Jet& u) { return u.compose(trig_series(u.value(), u.order(), true)); }
    friend Jet cos(const Jet& u) { return u.compose(trig_series(u.value(), u.order(), false)); }

    friend Jet powi(const Jet& u, long e) {
        if (e < 0) return recip(powi(u, -e));
        Jet acc = Jet::constant(u.space(), 1.0);
        for (long i = 0; i < e; ++i) acc = acc * u;
        return acc;
    }

    bool same_space(const Jet& o) const { return space_ == o.space_; }

private:
    explicit Jet(const JetSpace& sp) : space_(&sp), c_(sp.size(), 0.0) {}

    static std::vector<double> trig_series(double u0, int order, bool is_sin) {
        std::vector<double> phi(order + 1);
        double s = std::sin(u0), c = std::cos(u0);
        double cyc[4] = {s, c, -s, -c};  // derivatives of sin
        double fact = 1.0;
        for (int k = 0; k <= order; ++k) {
            phi[k] = cyc[(k + (is_sin ? 0 : 1)) % 4] / fact;
            fact *= (k + 1);
        }
        return phi;
    }

    /// phi(u) for a univariate series phi given by Taylor coefficients at u.value().
    Jet compose(const std::vector<double>& phi) const {
        Jet w = *this;
        w.c_[0] = 0.0;
        Jet out = Jet::constant(*space_, phi[0]);
        Jet pw = Jet::constant(*space_, 1.0);
        for (int k = 1; k <= order(); ++k) {
            pw = pw * w;
            if (phi[k] != 0.0)
                for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] += phi[k] * pw.c_[i];
        }
        return out;
    }

    Jet truncate(const JetSpace& sp) const {
        if (&sp == space_) return *this;
        Jet out(sp);
        for (std::size_t i = 0; i < sp.size(); ++i) out.c_[i] = c_[space_->rank(sp.index(i))];
        return out;
    }

    double lookup(const JetSpace& sp, std::size_t i) const {
        if (&sp == space_) return c_[i];
        return c_[space_->rank(sp.index(i))];
    }

    static std::tuple<const JetSpace*, const Jet*, const Jet*> align(const Jet& a, const Jet& b) {
        if (a.space_->nvars() != b.space_->nvars())
            throw std::logic_error("Jet: operands over different variable sets");
        const JetSpace* lo = (a.order() <= b.order()) ? a.space_ : b.space_;
        return {lo, &a, &b};
    }

    const JetSpace* space_;
    std::vector<double> c_;
};

}  // namespace lsinf
