#include "bie/simd.hpp"

#include <cmath>

#if defined(BIE_HAVE_AVX2_TU) && defined(__AVX2__)
#include <immintrin.h>

namespace bie::simd::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void gemm_nt_avx2(std::size_t m, std::size_t n, std::size_t k,
                  const double* A, std::size_t lda,
                  const double* B, std::size_t ldb,
                  double* C, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = A + i * lda;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const double* b0 = B + (j + 0) * ldb;
            const double* b1 = B + (j + 1) * ldb;
            const double* b2 = B + (j + 2) * ldb;
            const double* b3 = B + (j + 3) * ldb;
            __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
            __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
            std::size_t l = 0;
            for (; l + 4 <= k; l += 4) {
                const __m256d va = _mm256_loadu_pd(ai + l);
                acc0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + l), acc0);
                acc1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + l), acc1);
                acc2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + l), acc2);
                acc3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + l), acc3);
            }
            double s0 = hsum(acc0), s1 = hsum(acc1), s2 = hsum(acc2), s3 = hsum(acc3);
            for (; l < k; ++l) {
                const double a = ai[l];
                s0 += a * b0[l];
                s1 += a * b1[l];
                s2 += a * b2[l];
                s3 += a * b3[l];
            }
            C[i * ldc + j + 0] += s0;
            C[i * ldc + j + 1] += s1;
            C[i * ldc + j + 2] += s2;
            C[i * ldc + j + 3] += s3;
        }
        for (; j < n; ++j) {
            const double* bj = B + j * ldb;
            __m256d acc = _mm256_setzero_pd();
            std::size_t l = 0;
            for (; l + 4 <= k; l += 4)
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(ai + l), _mm256_loadu_pd(bj + l), acc);
            double s = hsum(acc);
            for (; l < k; ++l) s += ai[l] * bj[l];
            C[i * ldc + j] += s;
        }
    }
}

inline void row_fma(const double* src, double a, double* dst, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d vc = _mm256_loadu_pd(dst + j);
        vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(src + j), vc);
        _mm256_storeu_pd(dst + j, vc);
    }
    for (; j < n; ++j) dst[j] += a * src[j];
}

void gemm_nn_avx2(std::size_t m, std::size_t n, std::size_t k,
                  const double* A, std::size_t lda,
                  const double* B, std::size_t ldb,
                  double* C, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = C + i * ldc;
        for (std::size_t l = 0; l < k; ++l) row_fma(B + l * ldb, A[i * lda + l], ci, n);
    }
}

void gemm_tn_avx2(std::size_t m, std::size_t n, std::size_t k,
                  const double* A, std::size_t lda,
                  const double* B, std::size_t ldb,
                  double* C, std::size_t ldc) {
    for (std::size_t l = 0; l < k; ++l) {
        const double* bl = B + l * ldb;
        for (std::size_t i = 0; i < m; ++i) row_fma(bl, A[l * lda + i], C + i * ldc, n);
    }
}

void adam_update_avx2(double* w, double* m, double* v, const double* g,
                      std::size_t n, double beta1, double beta2, double eps,
                      double lr, double bc1, double bc2) {
    const __m256d vb1 = _mm256_set1_pd(beta1), vb1c = _mm256_set1_pd(1.0 - beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2), vb2c = _mm256_set1_pd(1.0 - beta2);
    const __m256d veps = _mm256_set1_pd(eps), vlr = _mm256_set1_pd(lr);
    const __m256d vbc1 = _mm256_set1_pd(bc1), vbc2 = _mm256_set1_pd(bc2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vm = _mm256_loadu_pd(m + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        vm = _mm256_add_pd(_mm256_mul_pd(vb1, vm), _mm256_mul_pd(vb1c, vg));
        vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv), _mm256_mul_pd(vb2c, _mm256_mul_pd(vg, vg)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_div_pd(vm, vbc1);
        const __m256d vhat = _mm256_div_pd(vv, vbc2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d vw = _mm256_loadu_pd(w + i);
        vw = _mm256_sub_pd(vw, _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom));
        _mm256_storeu_pd(w + i, vw);
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

extern const kernel_table avx2_table;
extern const bool avx2_table_present;
const kernel_table avx2_table = {
    dot_avx2,  sum_avx2,     axpy_avx2,    scale_avx2,
    hadamard_avx2, gemm_nt_avx2, gemm_nn_avx2, gemm_tn_avx2,
    adam_update_avx2,
};
const bool avx2_table_present = true;

}  // namespace bie::simd::detail

#else  // no AVX2 at compile time: alias to an empty marker, dispatch skips it

namespace bie::simd::detail {
extern const kernel_table avx2_table;
extern const bool avx2_table_present;
const kernel_table avx2_table = {};
const bool avx2_table_present = false;
}  // namespace bie::simd::detail

#endif
