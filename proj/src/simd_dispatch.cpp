#include "bie/simd.hpp"

#include <cstdlib>
#include <cstring>

#include "bie/errors.hpp"

namespace bie::simd {

namespace detail {
extern const kernel_table scalar_table;
extern const kernel_table avx2_table;
extern const bool avx2_table_present;
}  // namespace detail

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

backend resolve_backend() {
    const char* env = std::getenv("BIE_SIMD");
    if (env && *env) {
        if (std::strcmp(env, "scalar") == 0) return backend::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            require(detail::avx2_table_present && cpu_has_avx2(), errc::unsupported,
                    "BIE_SIMD=avx2 requested but AVX2 is unavailable");
            return backend::avx2;
        }
        require(std::strcmp(env, "auto") == 0, errc::invalid_argument,
                "BIE_SIMD must be one of scalar|avx2|auto");
    }
    return (detail::avx2_table_present && cpu_has_avx2()) ? backend::avx2 : backend::scalar;
}

}  // namespace

backend active_backend() {
    static const backend b = resolve_backend();
    return b;
}

const char* backend_name() {
    return active_backend() == backend::avx2 ? "avx2" : "scalar";
}

const kernel_table& kernels_for(backend b) {
    if (b == backend::avx2) {
        require(detail::avx2_table_present, errc::unsupported, "AVX2 backend not built");
        return detail::avx2_table;
    }
    return detail::scalar_table;
}

const kernel_table& kernels() {
    static const kernel_table& t = kernels_for(active_backend());
    return t;
}

}  // namespace bie::simd
