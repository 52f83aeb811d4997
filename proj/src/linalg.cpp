#include "bie/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bie/errors.hpp"
#include "bie/simd.hpp"

namespace bie {

mat matmul(const mat& A, const mat& B) {
    require(A.cols == B.rows, errc::invalid_argument, "matmul: inner dimensions differ");
    mat C(A.rows, B.cols);
    simd::kernels().gemm_nn(A.rows, B.cols, A.cols, A.a.data(), A.cols, B.a.data(), B.cols,
                            C.a.data(), C.cols);
    return C;
}

mat matmul_nt(const mat& A, const mat& B) {
    require(A.cols == B.cols, errc::invalid_argument, "matmul_nt: inner dimensions differ");
    mat C(A.rows, B.rows);
    simd::kernels().gemm_nt(A.rows, B.rows, A.cols, A.a.data(), A.cols, B.a.data(), B.cols,
                            C.a.data(), C.cols);
    return C;
}

std::vector<double> matvec(const mat& A, const std::vector<double>& x) {
    require(A.cols == x.size(), errc::invalid_argument, "matvec: dimension mismatch");
    std::vector<double> y(A.rows);
    for (std::size_t i = 0; i < A.rows; ++i) y[i] = simd::dot(A.row(i), x.data(), A.cols);
    return y;
}

mat transpose(const mat& A) {
    mat T(A.cols, A.rows);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
    return T;
}

cmat matmul(const cmat& A, const cmat& B) {
    require(A.cols == B.rows, errc::invalid_argument, "matmul: inner dimensions differ");
    const std::size_t m = A.rows, k = A.cols, n = B.cols;
    mat Ar(m, k), Ai(m, k), Br(k, n), Bi(k, n);
    for (std::size_t i = 0; i < m * k; ++i) {
        Ar.a[i] = A.a[i].real();
        Ai.a[i] = A.a[i].imag();
    }
    for (std::size_t i = 0; i < k * n; ++i) {
        Br.a[i] = B.a[i].real();
        Bi.a[i] = B.a[i].imag();
    }
    const auto& kt = simd::kernels();
    mat Cr(m, n), Ci(m, n);
    kt.gemm_nn(m, n, k, Ar.a.data(), k, Br.a.data(), n, Cr.a.data(), n);
    mat tmp(m, n);
    kt.gemm_nn(m, n, k, Ai.a.data(), k, Bi.a.data(), n, tmp.a.data(), n);
    for (std::size_t i = 0; i < m * n; ++i) Cr.a[i] -= tmp.a[i];
    kt.gemm_nn(m, n, k, Ar.a.data(), k, Bi.a.data(), n, Ci.a.data(), n);
    kt.gemm_nn(m, n, k, Ai.a.data(), k, Br.a.data(), n, Ci.a.data(), n);
    cmat C(m, n);
    for (std::size_t i = 0; i < m * n; ++i) C.a[i] = cplx(Cr.a[i], Ci.a[i]);
    return C;
}

std::vector<cplx> matvec(const cmat& A, const std::vector<cplx>& x) {
    require(A.cols == x.size(), errc::invalid_argument, "matvec: dimension mismatch");
    std::vector<cplx> y(A.rows, cplx(0, 0));
    for (std::size_t i = 0; i < A.rows; ++i) {
        cplx acc(0, 0);
        const cplx* row = A.a.data() + i * A.cols;
        for (std::size_t j = 0; j < A.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

namespace {

// LU with partial pivoting, in place. Returns false on exact singularity.
template <typename T>
bool lu_factor(std::size_t n, std::vector<T>& a, std::vector<std::size_t>& piv) {
    piv.resize(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t p = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double v = std::abs(a[i * n + col]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best == 0.0) return false;
        if (p != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[p * n + j], a[col * n + j]);
            std::swap(piv[p], piv[col]);
        }
        const T pivval = a[col * n + col];
        for (std::size_t i = col + 1; i < n; ++i) {
            const T f = a[i * n + col] / pivval;
            a[i * n + col] = f;
            if (f != T(0))
                for (std::size_t j = col + 1; j < n; ++j) a[i * n + j] -= f * a[col * n + j];
        }
    }
    return true;
}

template <typename T>
void lu_apply(std::size_t n, const std::vector<T>& a, const std::vector<std::size_t>& piv,
              std::vector<T>& b) {
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= a[i * n + j] * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= a[ii * n + j] * x[j];
        x[ii] /= a[ii * n + ii];
    }
    b = std::move(x);
}

// Transposed solve, needed by the 1-norm condition estimator.
template <typename T>
void lu_apply_trans(std::size_t n, const std::vector<T>& a, const std::vector<std::size_t>& piv,
                    std::vector<T>& b) {
    std::vector<T> x = b;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) x[i] -= a[j * n + i] * x[j];
        x[i] /= a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;)
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= a[j * n + ii] * x[j];
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) out[piv[i]] = x[i];
    b = std::move(out);
}

template <typename T>
double norm1_mat(std::size_t n, const std::vector<T>& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i * n + j]);
        best = std::max(best, s);
    }
    return best;
}

// Hager/Higham estimate of ||A^{-1}||_1 from the LU factors.
template <typename T>
double inv_norm1_estimate(std::size_t n, const std::vector<T>& lu,
                          const std::vector<std::size_t>& piv) {
    std::vector<T> x(n, T(1.0 / double(n)));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        lu_apply(n, lu, piv, x);
        double nx = 0.0;
        for (auto& v : x) nx += std::abs(v);
        est = std::max(est, nx);
        std::vector<T> xi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::abs(x[i]);
            xi[i] = (m == 0.0) ? T(1) : x[i] / T(m);
        }
        lu_apply_trans(n, lu, piv, xi);
        std::size_t jmax = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(xi[i]) > best) {
                best = std::abs(xi[i]);
                jmax = i;
            }
        std::vector<T> e(n, T(0));
        e[jmax] = T(1);
        x = std::move(e);
    }
    return est;
}

template <typename T>
std::vector<T> lu_solve_impl(std::size_t rows, std::size_t cols, std::vector<T> a,
                             std::vector<T> b, double cond_limit, double* cond_out) {
    require(rows == cols, errc::invalid_argument, "lu_solve: matrix must be square");
    require(rows == b.size(), errc::invalid_argument, "lu_solve: rhs size mismatch");
    const std::size_t n = rows;
    const double a1 = norm1_mat(n, a);
    std::vector<std::size_t> piv;
    if (!lu_factor(n, a, piv))
        fail(errc::discretization_singular, "discretization singular: exact zero pivot");
    const double cond = a1 * inv_norm1_estimate(n, a, piv);
    if (cond_out) *cond_out = cond;
    if (cond_limit > 0 && !(cond <= cond_limit))
        fail(errc::discretization_singular,
             "discretization singular: condition estimate " + std::to_string(cond));
    lu_apply(n, a, piv, b);
    return b;
}

}  // namespace

std::vector<double> lu_solve(mat A, std::vector<double> b, double cond_limit, double* cond_out) {
    return lu_solve_impl(A.rows, A.cols, std::move(A.a), std::move(b), cond_limit, cond_out);
}

std::vector<cplx> lu_solve(cmat A, std::vector<cplx> b, double cond_limit, double* cond_out) {
    return lu_solve_impl(A.rows, A.cols, std::move(A.a), std::move(b), cond_limit, cond_out);
}

svd_result jacobi_svd(const mat& A) {
    // One-sided Jacobi on columns of a working copy W (m x n): W = U S, with V
    // accumulated from the rotations. Robust and deterministic; O(n^2 m) per
    // sweep, ample for the system sizes seen here.
    const std::size_t m = A.rows, n = A.cols;
    mat W = A;
    mat V(n, n);
    for (std::size_t i = 0; i < n; ++i) V(i, i) = 1.0;

    auto col_dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += W(i, p) * W(i, q);
        return s;
    };

    const int max_sweeps = 60;
    const double tol = 1e-15;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = col_dot(p, q);
                const double app = col_dot(p, p);
                const double aqq = col_dot(q, q);
                if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
                off = std::max(off, std::abs(apq) / std::sqrt(app * aqq + 1e-300));
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wp = W(i, p), wq = W(i, q);
                    W(i, p) = c * wp - s * wq;
                    W(i, q) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = V(i, p), vq = V(i, q);
                    V(i, p) = c * vp - s * vq;
                    V(i, q) = s * vp + c * vq;
                }
            }
        }
        if (off < 1e-14) break;
    }

    svd_result r;
    r.s.resize(n);
    r.U = mat(m, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(col_dot(j, j));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
    r.V = mat(n, n);
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t j = order[jj];
        r.s[jj] = norms[j];
        const double inv = norms[j] > 0 ? 1.0 / norms[j] : 0.0;
        for (std::size_t i = 0; i < m; ++i) r.U(i, jj) = W(i, j) * inv;
        for (std::size_t i = 0; i < n; ++i) r.V(i, jj) = V(i, j);
    }
    return r;
}

std::vector<double> svd_min_norm_solve(const mat& A, const std::vector<double>& b,
                                       double rel_tol) {
    require(A.rows == b.size(), errc::invalid_argument, "svd solve: rhs size mismatch");
    const svd_result s = jacobi_svd(A);
    const double smax = s.s.empty() ? 0.0 : s.s.front();
    std::vector<double> x(A.cols, 0.0);
    for (std::size_t j = 0; j < s.s.size(); ++j) {
        if (s.s[j] <= rel_tol * smax) continue;
        double uj_b = 0.0;
        for (std::size_t i = 0; i < A.rows; ++i) uj_b += s.U(i, j) * b[i];
        const double coef = uj_b / s.s[j];
        for (std::size_t i = 0; i < A.cols; ++i) x[i] += coef * s.V(i, j);
    }
    return x;
}

double max_abs(const mat& A) {
    double best = 0.0;
    for (double v : A.a) best = std::max(best, std::abs(v));
    return best;
}

double norm2(const std::vector<double>& v) {
    return std::sqrt(simd::dot(v.data(), v.data(), v.size()));
}

double norm2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace bie
