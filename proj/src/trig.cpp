#include "bie/trig.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "bie/errors.hpp"
#include "bie/simd.hpp"

namespace bie {

namespace {

bool is_pow2(std::size_t q) { return q != 0 && (q & (q - 1)) == 0; }

void check_resolved(std::size_t n, std::size_t Q, const char* who) {
    require(Q >= 2 * n + 2, errc::invalid_argument,
            std::string(who) + ": grid size must be at least 2n+2");
}

void check_grid(std::size_t n, std::size_t Q, const char* who) {
    require(is_pow2(Q), errc::invalid_argument,
            std::string(who) + ": grid size must be a power of two");
    check_resolved(n, Q, who);
}

}  // namespace

std::size_t trig_order(const coeff_vec& c) {
    require(!c.empty() && c.size() % 2 == 1, errc::invalid_argument,
            "coefficient vector must have odd length 2n+1");
    return (c.size() - 1) / 2;
}

std::vector<double> uniform_grid(std::size_t Q) {
    std::vector<double> ts(Q);
    for (std::size_t q = 0; q < Q; ++q) ts[q] = two_pi * double(q) / double(Q);
    return ts;
}

double trig_eval(const coeff_vec& c, double t) {
    const std::size_t n = trig_order(c);
    // rotation recurrence for (cos kt, sin kt)
    const double ct = std::cos(t), st = std::sin(t);
    double ck = 1.0, sk = 0.0;
    double acc = c[0];
    for (std::size_t k = 1; k <= n; ++k) {
        const double nc = ck * ct - sk * st;
        const double ns = sk * ct + ck * st;
        ck = nc;
        sk = ns;
        acc += c[k] * ck + c[n + k] * sk;
    }
    return acc;
}

std::vector<double> trig_eval(const coeff_vec& c, const std::vector<double>& ts) {
    std::vector<double> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = trig_eval(c, ts[i]);
    return out;
}

std::vector<double> trig_synth(const coeff_vec& c, std::size_t Q) {
    const std::size_t n = trig_order(c);
    check_grid(n, Q, "trig_synth");
    const mat& E = trig_basis(n, Q);
    std::vector<double> out(Q, 0.0);
    // out = E * c
    for (std::size_t q = 0; q < Q; ++q)
        out[q] = simd::dot(E.row(q), c.data(), c.size());
    return out;
}

coeff_vec trig_project(const std::vector<double>& samples, std::size_t n) {
    const std::size_t Q = samples.size();
    check_grid(n, Q, "trig_project");
    const mat& P = trig_projector(n, Q);
    coeff_vec c(coeff_len(n), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = simd::dot(P.row(i), samples.data(), Q);
    return c;
}

coeff_vec trig_derivative(const coeff_vec& c) {
    const std::size_t n = trig_order(c);
    coeff_vec d(c.size(), 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        d[k] = double(k) * c[n + k];       // a_k' = k b_k
        d[n + k] = -double(k) * c[k];      // b_k' = -k a_k
    }
    return d;
}

coeff_vec trig_resize(const coeff_vec& c, std::size_t n) {
    const std::size_t m = trig_order(c);
    coeff_vec out(coeff_len(n), 0.0);
    const std::size_t keep = std::min(n, m);
    out[0] = c[0];
    for (std::size_t k = 1; k <= keep; ++k) {
        out[k] = c[k];
        out[n + k] = c[m + k];
    }
    return out;
}

double trig_l2_inner(const coeff_vec& a, const coeff_vec& b) {
    // Orders may differ: the shorter vector is implicitly zero-padded, so
    // only the shared modes contribute.
    const std::size_t na = trig_order(a), nb = trig_order(b);
    const double pi = two_pi / 2.0;
    double acc = two_pi * a[0] * b[0];
    for (std::size_t k = 1; k <= std::min(na, nb); ++k)
        acc += pi * (a[k] * b[k] + a[na + k] * b[nb + k]);
    return acc;
}

double trig_l2_norm(const coeff_vec& c) { return std::sqrt(trig_l2_inner(c, c)); }

namespace {

std::mutex basis_mutex;
std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<mat>> basis_cache;
std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<mat>> proj_cache;

std::unique_ptr<mat> make_basis(std::size_t n, std::size_t Q) {
    auto E = std::make_unique<mat>(Q, coeff_len(n));
    for (std::size_t q = 0; q < Q; ++q) {
        const double t = two_pi * double(q) / double(Q);
        const double ct = std::cos(t), st = std::sin(t);
        double ck = 1.0, sk = 0.0;
        double* row = E->row(q);
        row[0] = 1.0;
        for (std::size_t k = 1; k <= n; ++k) {
            const double nc = ck * ct - sk * st;
            const double ns = sk * ct + ck * st;
            ck = nc;
            sk = ns;
            row[k] = ck;
            row[n + k] = sk;
        }
    }
    return E;
}

}  // namespace

const mat& trig_basis(std::size_t n, std::size_t Q) {
    check_resolved(n, Q, "trig_basis");
    std::lock_guard<std::mutex> lock(basis_mutex);
    auto& slot = basis_cache[{n, Q}];
    if (!slot) slot = make_basis(n, Q);
    return *slot;
}

const mat& trig_projector(std::size_t n, std::size_t Q) {
    check_resolved(n, Q, "trig_projector");
    std::lock_guard<std::mutex> lock(basis_mutex);
    auto& slot = proj_cache[{n, Q}];
    if (!slot) {
        auto E = make_basis(n, Q);
        auto P = std::make_unique<mat>(coeff_len(n), Q);
        const double w0 = 1.0 / double(Q);
        const double wk = 2.0 / double(Q);
        for (std::size_t i = 0; i < P->rows; ++i) {
            const double w = (i == 0) ? w0 : wk;
            for (std::size_t q = 0; q < Q; ++q) (*P)(i, q) = w * (*E)(q, i);
        }
        slot = std::move(P);
    }
    return *slot;
}

std::size_t default_grid(std::size_t n) {
    // Power of two (the native grid size for trig_synth / trig_project) with
    // generous oversampling of the order.
    std::size_t q = 512;
    while (q < 16 * n) q <<= 1;
    return q;
}

}  // namespace bie
