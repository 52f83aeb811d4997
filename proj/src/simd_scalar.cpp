#include "bie/simd.hpp"

#include <cmath>

// Reference backend: straight loops, no intrinsics. This is the ground truth
// the AVX2 variant is tested against.

namespace bie::simd::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void gemm_nt_scalar(std::size_t m, std::size_t n, std::size_t k,
                    const double* A, std::size_t lda,
                    const double* B, std::size_t ldb,
                    double* C, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = A + i * lda;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = B + j * ldb;
            double acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += ai[l] * bj[l];
            C[i * ldc + j] += acc;
        }
    }
}

void gemm_nn_scalar(std::size_t m, std::size_t n, std::size_t k,
                    const double* A, std::size_t lda,
                    const double* B, std::size_t ldb,
                    double* C, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = C + i * ldc;
        for (std::size_t l = 0; l < k; ++l) {
            const double a = A[i * lda + l];
            const double* bl = B + l * ldb;
            for (std::size_t j = 0; j < n; ++j) ci[j] += a * bl[j];
        }
    }
}

void gemm_tn_scalar(std::size_t m, std::size_t n, std::size_t k,
                    const double* A, std::size_t lda,
                    const double* B, std::size_t ldb,
                    double* C, std::size_t ldc) {
    for (std::size_t l = 0; l < k; ++l) {
        const double* bl = B + l * ldb;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = A[l * lda + i];
            double* ci = C + i * ldc;
            for (std::size_t j = 0; j < n; ++j) ci[j] += a * bl[j];
        }
    }
}

void adam_update_scalar(double* w, double* m, double* v, const double* g,
                        std::size_t n, double beta1, double beta2, double eps,
                        double lr, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

extern const kernel_table scalar_table;
const kernel_table scalar_table = {
    dot_scalar,  sum_scalar,     axpy_scalar,    scale_scalar,
    hadamard_scalar, gemm_nt_scalar, gemm_nn_scalar, gemm_tn_scalar,
    adam_update_scalar,
};

}  // namespace bie::simd::detail
