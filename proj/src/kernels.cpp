#include "bie/kernels.hpp"

#include <cmath>

#include "bie/bessel.hpp"
#include "bie/errors.hpp"
#include "bie/quadrature.hpp"

namespace bie {

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;
constexpr double euler_gamma = 0.57721566490153286060651209008240243;
const cplx iu{0.0, 1.0};

double log4sin2(double t, double s) {
    const double h = std::sin(0.5 * (t - s));
    return std::log(4.0 * h * h);
}

}  // namespace

double laplace_phi(vec2 x, vec2 y) {
    const double r = norm(x - y);
    require(r > 0.0, errc::invalid_argument, "laplace_phi: coincident points");
    return -std::log(r) / (2.0 * pi);
}

vec2 laplace_grad_x(vec2 x, vec2 y) {
    const vec2 d = x - y;
    const double r2 = dot(d, d);
    require(r2 > 0.0, errc::invalid_argument, "laplace_grad_x: coincident points");
    return (-1.0 / (2.0 * pi * r2)) * d;
}

double laplace_dphi_dny(vec2 x, vec2 y, vec2 ny) {
    const vec2 d = x - y;
    const double r2 = dot(d, d);
    require(r2 > 0.0, errc::invalid_argument, "laplace_dphi_dny: coincident points");
    return dot(d, ny) / (2.0 * pi * r2);
}

cplx helmholtz_phi(double k, vec2 x, vec2 y) {
    const double r = norm(x - y);
    require(r > 0.0, errc::invalid_argument, "helmholtz_phi: coincident points");
    return 0.25 * iu * hankel1_0(k * r);
}

cplx helmholtz_dphi_dny(double k, vec2 x, vec2 y, vec2 ny) {
    const vec2 d = x - y;
    const double r = norm(d);
    require(r > 0.0, errc::invalid_argument,
            "helmholtz_dphi_dny: coincident points");
    return 0.25 * iu * k * hankel1_1(k * r) * (dot(d, ny) / r);
}

cplx plane_wave(double k, vec2 d, vec2 x) {
    const double phase = k * dot(d, x);
    return {std::cos(phase), std::sin(phase)};
}

mat2 navier_u_free(vec2 x, vec2 y, double G, double nu) {
    const vec2 dv = y - x;
    const double r = norm(dv);
    require(r > 0.0, errc::invalid_argument, "navier_u_free: coincident points");
    const double rdx = dv.x / r, rdy = dv.y / r;
    const double c1 = 1.0 / (8.0 * pi * G * (1.0 - nu));
    const double ln1r = -std::log(r);
    const double kd = (3.0 - 4.0 * nu) * ln1r;
    return {c1 * (kd + rdx * rdx), c1 * rdx * rdy, c1 * rdx * rdy,
            c1 * (kd + rdy * rdy)};
}

mat2 navier_t_free(vec2 x, vec2 y, vec2 ny, double G, double nu) {
    (void)G;  // traction kernel is independent of the shear modulus
    const vec2 dv = y - x;
    const double r = norm(dv);
    require(r > 0.0, errc::invalid_argument, "navier_t_free: coincident points");
    const double rdx = dv.x / r, rdy = dv.y / r;
    const double drdn = rdx * ny.x + rdy * ny.y;
    const double c2 = -1.0 / (4.0 * pi * (1.0 - nu) * r);
    const double m2nu = 1.0 - 2.0 * nu;
    mat2 T;
    T.m00 = c2 * (drdn * (m2nu + 2.0 * rdx * rdx));
    T.m11 = c2 * (drdn * (m2nu + 2.0 * rdy * rdy));
    T.m01 = c2 * (drdn * 2.0 * rdx * rdy - m2nu * (rdx * ny.y - rdy * ny.x));
    T.m10 = c2 * (drdn * 2.0 * rdx * rdy - m2nu * (rdy * ny.x - rdx * ny.y));
    return T;
}

double kernel_double_layer(const boundary_grid& g, std::size_t i, std::size_t j) {
    if (i == j) return -g.cur[i] * g.sp[i] / (4.0 * pi);
    const vec2 d = g.p[i] - g.p[j];
    const double r2 = dot(d, d);
    return dot(d, g.nrm[j]) / (2.0 * pi * r2) * g.sp[j];
}

double kernel_double_layer_adjoint(const boundary_grid& g, std::size_t i,
                                   std::size_t j) {
    if (i == j) return -g.cur[i] * g.sp[i] / (4.0 * pi);
    const vec2 d = g.p[i] - g.p[j];
    const double r2 = dot(d, d);
    return -dot(d, g.nrm[i]) / (2.0 * pi * r2) * g.sp[j];
}

double kernel_double_layer_modified(const boundary_grid& g, std::size_t i,
                                    std::size_t j) {
    // rank-one augmentation (1/2pi) int phi |gamma'| ds removes the exterior
    // nullspace; the 1/(2pi) normalization fixes the density scale so that a
    // unit boundary value on the unit circle maps to a unit density
    return kernel_double_layer(g, i, j) + g.sp[j] / (2.0 * pi);
}

cplx_split helmholtz_combined_split(const boundary_grid& g, double k, double eta,
                                    std::size_t i, std::size_t j) {
    require(k > 0.0, errc::invalid_argument, "helmholtz: wavenumber must be > 0");
    cplx_split out;
    if (i == j) {
        const double sp = g.sp[i];
        // single layer: M1 = -J0(kr)|g'|/(4pi) -> -|g'|/(4pi) at r = 0
        const double M1 = -sp / (4.0 * pi);
        const cplx M2 =
            (0.25 * iu - euler_gamma / (2.0 * pi) -
             std::log(0.5 * k * sp) / (2.0 * pi)) *
            sp;
        // double layer: L1 -> 0, L2 -> -cur |g'| / (4pi)
        const double L2 = -g.cur[i] * sp / (4.0 * pi);
        out.log_part = cplx(0.0, 0.0) - iu * eta * M1;
        out.smooth = cplx(L2, 0.0) - iu * eta * M2;
        return out;
    }
    const vec2 d = g.p[i] - g.p[j];
    const double r = norm(d);
    const double kr = k * r;
    const double sp = g.sp[j];
    const double dn = dot(d, g.nrm[j]) / r;
    const double lg = log4sin2(g.t[i], g.t[j]);

    const cplx M = 0.25 * iu * hankel1_0(kr) * sp;
    const double M1 = -bessel_j0(kr) * sp / (4.0 * pi);
    const cplx M2 = M - M1 * lg;

    const cplx L = 0.25 * iu * k * hankel1_1(kr) * dn * sp;
    const double L1 = -(k / (4.0 * pi)) * bessel_j1(kr) * dn * sp;
    const cplx L2 = L - L1 * lg;

    out.log_part = cplx(L1, 0.0) - iu * eta * M1;
    out.smooth = L2 - iu * eta * M2;
    return out;
}

cplx helmholtz_combined(const boundary_grid& g, double k, double eta,
                        std::size_t i, std::size_t j) {
    require(i != j, errc::invalid_argument,
            "helmholtz_combined: kernel diverges on the diagonal");
    const vec2 d = g.p[i] - g.p[j];
    const double r = norm(d);
    const double dn = dot(d, g.nrm[j]) / r;
    const cplx M = 0.25 * iu * hankel1_0(k * r) * g.sp[j];
    const cplx L = 0.25 * iu * k * hankel1_1(k * r) * dn * g.sp[j];
    return L - iu * eta * M;
}

mat2_split navier_u_split(const boundary_grid& g, double G, double nu,
                          std::size_t i, std::size_t j) {
    require(G > 0.0 && nu < 0.5, errc::invalid_argument,
            "navier: need G > 0 and nu < 1/2");
    const double c1 = 1.0 / (8.0 * pi * G * (1.0 - nu));
    const double k34 = 3.0 - 4.0 * nu;
    mat2_split out;
    if (i == j) {
        const double sp = g.sp[i];
        const double tx = g.d1[i].x / sp, ty = g.d1[i].y / sp;
        const double diag = -0.5 * c1 * k34 * sp;
        out.log_part = {diag, 0.0, 0.0, diag};
        const double kd = -k34 * std::log(sp);
        out.smooth = {c1 * (kd + tx * tx) * sp, c1 * tx * ty * sp,
                      c1 * tx * ty * sp, c1 * (kd + ty * ty) * sp};
        return out;
    }
    const vec2 dv = g.p[j] - g.p[i];
    const double r = norm(dv);
    const double rdx = dv.x / r, rdy = dv.y / r;
    const double sp = g.sp[j];
    const double lg = log4sin2(g.t[i], g.t[j]);
    const double ln1r = -std::log(r);
    const double kd = k34 * ln1r;
    const double diag = -0.5 * c1 * k34 * sp;
    out.log_part = {diag, 0.0, 0.0, diag};
    out.smooth = {c1 * (kd + rdx * rdx) * sp - diag * lg, c1 * rdx * rdy * sp,
                  c1 * rdx * rdy * sp, c1 * (kd + rdy * rdy) * sp - diag * lg};
    return out;
}

mat2 navier_t_kernel(const boundary_grid& g, double G, double nu, std::size_t i,
                     std::size_t j) {
    require(i != j, errc::invalid_argument,
            "navier_t_kernel: kernel diverges on the diagonal");
    mat2 T = navier_t_free(g.p[i], g.p[j], g.nrm[j], G, nu);
    const double sp = g.sp[j];
    return {T.m00 * sp, T.m01 * sp, T.m10 * sp, T.m11 * sp};
}

double gauss_jump_residual(const boundary& b, std::size_t Q) {
    const boundary_grid g = sample_grid(b, Q);
    const double w = trapezoid_weight(Q);
    double worst = 0.0;
    for (std::size_t c = 0; c < 16; ++c) {
        const std::size_t i = c * (Q / 16);
        double acc = 0.0;
        for (std::size_t j = 0; j < Q; ++j) acc += w * kernel_double_layer(g, i, j);
        worst = std::max(worst, std::abs(acc + 0.5));
    }
    return worst;
}

double winding_integral(const boundary_grid& g, vec2 x) {
    const double w = trapezoid_weight(g.Q);
    double acc = 0.0;
    for (std::size_t j = 0; j < g.Q; ++j)
        acc += w * laplace_dphi_dny(x, g.p[j], g.nrm[j]) * g.sp[j];
    return acc;
}

}  // namespace bie
