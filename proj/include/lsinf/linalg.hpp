#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lsinf/jet.hpp"

namespace lsinf {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Jet& j) { return std::abs(j.value()); }
inline double value_of(double x) { return x; }
inline double value_of(const Jet& j) { return j.value(); }
inline double sqrt_t(double x) { return std::sqrt(x); }
inline Jet sqrt_t(const Jet& j) { return sqrt(j); }

inline double zero_like(double) { return 0.0; }
inline double one_like(double) { return 1.0; }
inline Jet zero_like(const Jet& j) { return Jet::constant(j.space(), 0.0); }
inline Jet one_like(const Jet& j) { return Jet::constant(j.space(), 1.0); }

/// Dense row-major matrix over double or Jet entries. Sized for frames and
/// charts (dimensions <= ~6); all algorithms here are plain O(n^3) with
/// partial pivoting on the value part.
template <typename T>
struct Mat {
    int rows = 0, cols = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(int r, int c, const T& fill) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

    T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    Mat transposed() const {
        Mat t(cols, rows, a.empty() ? T{} : zero_like(a[0]));
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

using MatD = Mat<double>;

inline MatD mat_identity(int n) {
    MatD m(n, n, 0.0);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

template <typename T>
Mat<T> operator*(const Mat<T>& A, const Mat<T>& B) {
    if (A.cols != B.rows) throw std::logic_error("Mat: shape mismatch in product");
    Mat<T> C(A.rows, B.cols, zero_like(A.a[0]));
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k)
            for (int j = 0; j < B.cols; ++j) C(i, j) = C(i, j) + A(i, k) * B(k, j);
    return C;
}

/// Gauss-Jordan inverse with partial pivoting (pivot chosen on the value
/// part for Jet entries). Throws on a numerically singular matrix.
template <typename T>
Mat<T> inverse(Mat<T> m) {
    if (m.rows != m.cols) throw std::logic_error("Mat: inverse of non-square matrix");
    const int n = m.rows;
    Mat<T> inv(n, n, zero_like(m.a[0]));
    for (int i = 0; i < n; ++i) inv(i, i) = one_like(m.a[0]);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (magnitude(m(r, col)) > magnitude(m(piv, col))) piv = r;
        if (magnitude(m(piv, col)) == 0.0) throw eval_error("singular matrix");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        T d = m(col, col);
        for (int j = 0; j < n; ++j) {
            m(col, j) = m(col, j) / d;
            inv(col, j) = inv(col, j) / d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            T f = m(r, col);
            if (magnitude(f) == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                m(r, j) = m(r, j) - f * m(col, j);
                inv(r, j) = inv(r, j) - f * inv(col, j);
            }
        }
    }
    return inv;
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix;
/// works over Jet entries (sqrt and division are jet operations).
template <typename T>
Mat<T> cholesky(const Mat<T>& g) {
    const int n = g.rows;
    Mat<T> L(n, n, zero_like(g.a[0]));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            T s = g(i, j);
            for (int k = 0; k < j; ++k) s = s - L(i, k) * L(j, k);
            if (i == j) {
                if (!(magnitude(s) > 0.0) || value_of(s) <= 0.0)
                    throw eval_error("matrix not positive definite");
                L(i, j) = sqrt_t(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return L;
}

/// Solve A x = b for square A (Gaussian elimination, partial pivoting).
inline std::vector<double> solve(MatD A, std::vector<double> b) {
    const int n = A.rows;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
        if (A(piv, col) == 0.0) throw eval_error("singular linear system");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(A(piv, j), A(col, j));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = A(r, col) / A(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) A(r, j) -= f * A(col, j);
            b[r] -= f * b[col];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) b[i] -= A(i, j) * b[j];
        b[i] /= A(i, i);
    }
    return b;
}

/// Least squares min |A x - b| via normal equations; fine at these scales.
inline std::vector<double> least_squares(const MatD& A, const std::vector<double>& b) {
    MatD At = A.transposed();
    MatD AtA = At * A;
    std::vector<double> Atb(A.cols, 0.0);
    for (int i = 0; i < A.cols; ++i)
        for (int r = 0; r < A.rows; ++r) Atb[i] += At(i, r) * b[r];
    return solve(AtA, Atb);
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
inline std::vector<double> sym_eigenvalues(MatD m) {
    const int n = m.rows;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int j = 0; j < n; ++j) {
                    double mpj = m(p, j), mqj = m(q, j);
                    m(p, j) = c * mpj - s * mqj;
                    m(q, j) = s * mpj + c * mqj;
                }
                for (int j = 0; j < n; ++j) {
                    double mjp = m(j, p), mjq = m(j, q);
                    m(j, p) = c * mjp - s * mjq;
                    m(j, q) = s * mjp + c * mjq;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = m(i, i);
    return ev;
}

inline double min_eigenvalue(const MatD& m) {
    auto ev = sym_eigenvalues(m);
    double mn = ev[0];
    for (double v : ev) mn = std::min(mn, v);
    return mn;
}

inline double max_eigenvalue(const MatD& m) {
    auto ev = sym_eigenvalues(m);
    double mx = ev[0];
    for (double v : ev) mx = std::max(mx, v);
    return mx;
}

/// Singular values via eigenvalues of A A^T (square or wide A).
inline std::vector<double> singular_values(const MatD& A) {
    MatD AAt = A * A.transposed();
    auto ev = sym_eigenvalues(AAt);
    for (double& v : ev) v = std::sqrt(std::max(v, 0.0));
    return ev;
}

/// Condition number sigma_max / sigma_min; infinity when rank-deficient.
inline double cond_number(const MatD& A) {
    auto sv = singular_values(A);
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (double s : sv) {
        mx = std::max(mx, s);
        mn = std::min(mn, s);
    }
    if (mn == 0.0) return std::numeric_limits<double>::infinity();
    return mx / mn;
}

/// Largest generalized eigenvalue of (B, A) for SPD A, i.e. lambda_max of
/// A^{-1/2} B A^{-1/2}, computed through the Cholesky factor of A.
inline double max_gen_eigenvalue(const MatD& B, const MatD& A) {
    MatD L = cholesky(A);
    MatD Linv = inverse(L);
    MatD C = Linv * B * Linv.transposed();
    // symmetrize against rounding
    for (int i = 0; i < C.rows; ++i)
        for (int j = i + 1; j < C.cols; ++j) {
            double v = 0.5 * (C(i, j) + C(j, i));
            C(i, j) = C(j, i) = v;
        }
    return max_eigenvalue(C);
}

}  // namespace lsinf
