#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bie {

// Dense row-major matrix of doubles. Deliberately minimal: the solvers below
// and the simd GEMM wrappers are all this project needs.
struct mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    mat() = default;
    mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }
};

using cplx = std::complex<double>;

struct cmat {
    std::size_t rows = 0, cols = 0;
    std::vector<cplx> a;

    cmat() = default;
    cmat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, cplx(0, 0)) {}

    cplx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// C = A * B (allocates C); routed through the simd backend.
mat matmul(const mat& A, const mat& B);
// C = A * B^T
mat matmul_nt(const mat& A, const mat& B);
// y = A x
std::vector<double> matvec(const mat& A, const std::vector<double>& x);
mat transpose(const mat& A);

// Complex matmul built from four real GEMMs (split storage internally).
cmat matmul(const cmat& A, const cmat& B);
std::vector<cplx> matvec(const cmat& A, const std::vector<cplx>& x);

// In-place LU with partial pivoting; solves A x = b. Also returns a 1-norm
// condition estimate (Higham-style inverse power estimate). Throws
// errc::discretization_singular when the matrix is numerically singular or
// cond exceeds `cond_limit`.
std::vector<double> lu_solve(mat A, std::vector<double> b, double cond_limit = 1e12,
                             double* cond_out = nullptr);
std::vector<cplx> lu_solve(cmat A, std::vector<cplx> b, double cond_limit = 1e12,
                           double* cond_out = nullptr);

// One-sided Jacobi SVD: A = U diag(s) V^T with A (m x n), m >= n is not
// required. Returns singular values descending; U (m x r), V (n x r), r = min(m,n).
struct svd_result {
    mat U, V;
    std::vector<double> s;
};
svd_result jacobi_svd(const mat& A);

// Minimum-norm least-squares solve via truncated SVD: directions with
// s_i <= rel_tol * s_max are dropped. Used for the one rank-deficient BIE
// family (interior Neumann), where the canonical representative matters.
std::vector<double> svd_min_norm_solve(const mat& A, const std::vector<double>& b,
                                       double rel_tol = 1e-10);

// Largest/smallest-magnitude diagnostic norms.
double max_abs(const mat& A);
double norm2(const std::vector<double>& v);
double norm2(const std::vector<cplx>& v);

}  // namespace bie
