#pragma once

#include <cstddef>

// Runtime-dispatched dense arithmetic kernels. Every routine has a scalar
// reference implementation and an AVX2/FMA variant; the active backend is
// chosen once per process from CPUID, overridable with BIE_SIMD=scalar|avx2.
// The two backends are equivalence-tested against each other; within one
// backend results are bit-reproducible (fixed loop order, no threading).

namespace bie::simd {

enum class backend { scalar, avx2 };

backend active_backend();
const char* backend_name();

struct kernel_table {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*hadamard)(const double*, const double*, double*, std::size_t);
    // C(m x n) += A(m x k) * B(n x k)^T ; row-major with leading dimensions
    void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k,
                    const double* A, std::size_t lda,
                    const double* B, std::size_t ldb,
                    double* C, std::size_t ldc);
    // C(m x n) += A(m x k) * B(k x n)
    void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k,
                    const double* A, std::size_t lda,
                    const double* B, std::size_t ldb,
                    double* C, std::size_t ldc);
    // C(m x n) += A(k x m)^T * B(k x n)
    void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k,
                    const double* A, std::size_t lda,
                    const double* B, std::size_t ldb,
                    double* C, std::size_t ldc);
    // Adam step on a flat parameter block; bc1/bc2 are the bias corrections
    // 1-beta1^t and 1-beta2^t already evaluated by the caller.
    void (*adam_update)(double* w, double* m, double* v, const double* g,
                        std::size_t n, double beta1, double beta2, double eps,
                        double lr, double bc1, double bc2);
};

const kernel_table& kernels();                  // active backend
const kernel_table& kernels_for(backend b);     // explicit backend (tests)

bool cpu_has_avx2();

// Convenience forwarders.
inline double dot(const double* a, const double* b, std::size_t n) { return kernels().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return kernels().sum(a, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { kernels().axpy(alpha, x, y, n); }
inline void scale(double alpha, double* x, std::size_t n) { kernels().scale(alpha, x, n); }
inline void hadamard(const double* a, const double* b, double* out, std::size_t n) { kernels().hadamard(a, b, out, n); }

}  // namespace bie::simd
