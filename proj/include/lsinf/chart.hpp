#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lsinf/expr.hpp"

namespace lsinf {

/// Corner coordinates below this are treated as lying on the boundary, to
/// keep denormals out of 1/x-type expressions.
inline constexpr double kBoundaryEps = 1e-300;

struct ChartPoint {
    std::vector<double> x;
    std::size_t dim() const { return x.size(); }
};

/// A single coordinate chart [0,inf)^k x R^(n-k). Coordinates are named
/// x1..xk (corner) and y1..y_{n-k} (free).
class Chart {
public:
    Chart(int n, int k) : n_(n), k_(k) {
        if (n < 1 || k < 0 || k > n) throw std::invalid_argument("Chart: need 0 <= k <= n, n >= 1");
        for (int i = 1; i <= k; ++i) vars_.names.push_back("x" + std::to_string(i));
        for (int i = 1; i <= n - k; ++i) vars_.names.push_back("y" + std::to_string(i));
    }

    int dim() const { return n_; }
    int corner_codim() const { return k_; }
    const VarTable& vars() const { return vars_; }
    const std::string& coord_name(int i) const { return vars_.names[i]; }

    bool contains(const ChartPoint& p) const {
        if (static_cast<int>(p.dim()) != n_) return false;
        for (int i = 0; i < k_; ++i)
            if (p.x[i] < 0.0) return false;
        return true;
    }

    bool is_interior(const ChartPoint& p) const {
        check_member(p);
        for (int i = 0; i < k_; ++i)
            if (p.x[i] < kBoundaryEps) return false;
        return true;
    }

    /// Number of hyperfaces the point lies on.
    int boundary_depth(const ChartPoint& p) const {
        check_member(p);
        int d = 0;
        for (int i = 0; i < k_; ++i)
            if (p.x[i] < kBoundaryEps) ++d;
        return d;
    }

    /// The defining function of face `face` (1-based), i.e. the coordinate
    /// expression x{face}.
    Expr defining_function(int face) const {
        if (face < 1 || face > k_)
            throw std::out_of_range("Chart::defining_function: face index out of range");
        return Expr::var(face - 1, vars_.names[face - 1]);
    }

    Expr parse(std::string_view text) const { return parse_expr(text, vars_); }

private:
    void check_member(const ChartPoint& p) const {
        if (!contains(p))
            throw std::domain_error("point outside chart domain (negative corner coordinate)");
    }

    int n_, k_;
    VarTable vars_;
};

}  // namespace lsinf
