#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bie/kernels.hpp"
#include "bie/quadrature.hpp"

using namespace bie;

namespace {

constexpr double pi = 3.14159265358979323846;

boundary circle(double r) {
    boundary b;
    b.x = {0.0, r, 0.0};
    b.y = {0.0, 0.0, r};
    return b;
}

boundary blob() {
    boundary b;  // smooth, simple, non-symmetric
    b.x = {0.1, 1.0, 0.12, -0.05, 0.0, 0.08, 0.02};
    b.y = {-0.2, 0.05, -0.03, 0.0, 0.9, 0.1, 0.02};
    return b;
}

}  // namespace

TEST_CASE("laplace fundamental solution and derivatives") {
    const vec2 x{1.0, 2.0}, y{0.4, 1.2};
    const double r = norm(x - y);
    CHECK(laplace_phi(x, y) == doctest::Approx(std::log(1.0 / r) / (2 * pi)));

    // gradient against central differences
    const double h = 1e-6;
    const double ddx = (laplace_phi({x.x + h, x.y}, y) -
                        laplace_phi({x.x - h, x.y}, y)) / (2 * h);
    const double ddy = (laplace_phi({x.x, x.y + h}, y) -
                        laplace_phi({x.x, x.y - h}, y)) / (2 * h);
    const vec2 g = laplace_grad_x(x, y);
    CHECK(g.x == doctest::Approx(ddx).epsilon(1e-7));
    CHECK(g.y == doctest::Approx(ddy).epsilon(1e-7));

    // normal derivative at y against a difference along n
    const vec2 n{0.6, 0.8};
    const double dn = (laplace_phi(x, {y.x + h * n.x, y.y + h * n.y}) -
                       laplace_phi(x, {y.x - h * n.x, y.y - h * n.y})) / (2 * h);
    CHECK(laplace_dphi_dny(x, y, n) == doctest::Approx(dn).epsilon(1e-7));
}

TEST_CASE("helmholtz kernel satisfies the Helmholtz equation off-source") {
    const double k = 2.0;
    const vec2 y{0.0, 0.0};
    const vec2 x{1.2, 0.5};
    const double h = 1e-3;
    const auto u = [&](vec2 p) { return helmholtz_phi(k, p, y); };
    const cplx lap = (u({x.x + h, x.y}) + u({x.x - h, x.y}) +
                      u({x.x, x.y + h}) + u({x.x, x.y - h}) -
                      4.0 * u(x)) / (h * h);
    const cplx resid = lap + k * k * u(x);
    CHECK(std::abs(resid) < 1e-4);

    // symmetry in the arguments
    CHECK(std::abs(helmholtz_phi(k, x, y) - helmholtz_phi(k, y, x)) < 1e-15);

    // normal derivative against a difference along n
    const vec2 n{0.8, -0.6};
    const double hh = 1e-5;
    const cplx dn = (helmholtz_phi(k, x, {y.x + hh * n.x, y.y + hh * n.y}) -
                     helmholtz_phi(k, x, {y.x - hh * n.x, y.y - hh * n.y})) /
                    (2 * hh);
    CHECK(std::abs(helmholtz_dphi_dny(k, x, y, n) - dn) < 1e-7);
}

TEST_CASE("plane wave") {
    const double k = 5.0;
    const vec2 d{1.0, 0.0};
    const vec2 x{0.3, 9.0};
    const cplx w = plane_wave(k, d, x);
    CHECK(std::abs(w) == doctest::Approx(1.0));
    CHECK(w.real() == doctest::Approx(std::cos(k * x.x)));
    CHECK(w.imag() == doctest::Approx(std::sin(k * x.x)));
}

TEST_CASE("kelvin displacement kernel is symmetric") {
    const double G = 1.3, nu = 0.3;
    const vec2 x{0.7, -0.2}, y{-0.5, 0.6};
    const mat2 U = navier_u_free(x, y, G, nu);
    const mat2 Us = navier_u_free(y, x, G, nu);
    CHECK(U.m01 == doctest::Approx(U.m10).epsilon(1e-14));
    CHECK(U.m00 == doctest::Approx(Us.m00).epsilon(1e-14));
    CHECK(U.m01 == doctest::Approx(Us.m01).epsilon(1e-14));
    CHECK(U.m11 == doctest::Approx(Us.m11).epsilon(1e-14));
}

TEST_CASE("traction kernel closure: circuit integral equals -identity inside") {
    // Somigliana with v = const, t = 0 requires  oint T(x, y) ds(y) = -I
    // for interior x, the sign convention elastic_field relies on.
    const boundary b = blob();
    const boundary_grid g = sample_grid(b, 512);
    const double w = trapezoid_weight(g.Q);
    const vec2 x{0.1, -0.15};  // interior for this blob
    mat2 acc;
    for (std::size_t j = 0; j < g.Q; ++j) {
        const mat2 T = navier_t_free(x, g.p[j], g.nrm[j], 1.0, 0.25);
        acc.m00 += w * T.m00 * g.sp[j];
        acc.m01 += w * T.m01 * g.sp[j];
        acc.m10 += w * T.m10 * g.sp[j];
        acc.m11 += w * T.m11 * g.sp[j];
    }
    CHECK(acc.m00 == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(acc.m11 == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(std::fabs(acc.m01) < 1e-8);
    CHECK(std::fabs(acc.m10) < 1e-8);
}

TEST_CASE("double-layer kernel diagonal carries the curvature limit") {
    const boundary b = blob();
    const boundary_grid g = sample_grid(b, 256);
    for (std::size_t i : {std::size_t(0), std::size_t(37), std::size_t(200)}) {
        const double want = -g.cur[i] * g.sp[i] / (4 * pi);
        CHECK(kernel_double_layer(g, i, i) == doctest::Approx(want).epsilon(1e-13));
        CHECK(kernel_double_layer_adjoint(g, i, i) ==
              doctest::Approx(want).epsilon(1e-13));
        // continuity: the near-diagonal value stays close to the limit
        CHECK(std::fabs(kernel_double_layer(g, i, (i + 1) % g.Q) - want) <
              0.1 * (std::fabs(want) + 0.1));
    }
}

TEST_CASE("adjoint kernel swaps the normal argument") {
    const boundary b = blob();
    const boundary_grid g = sample_grid(b, 128);
    const std::size_t i = 11, j = 87;
    // K'(t,s) = -(x-y).n(x)/(2 pi r^2) |gamma'(s)|
    const vec2 d = g.p[i] - g.p[j];
    const double r2 = dot(d, d);
    const double want = -dot(d, g.nrm[i]) / (2 * pi * r2) * g.sp[j];
    CHECK(kernel_double_layer_adjoint(g, i, j) ==
          doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("modified kernel adds the rank-one completion") {
    const boundary b = circle(1.0);
    const boundary_grid g = sample_grid(b, 64);
    const std::size_t i = 5, j = 40;
    const double plain = kernel_double_layer(g, i, j);
    const double modified = kernel_double_layer_modified(g, i, j);
    CHECK(modified - plain == doctest::Approx(g.sp[j] / (2 * pi)).epsilon(1e-12));
}

TEST_CASE("helmholtz split recombines to the full combined kernel") {
    const boundary b = blob();
    const boundary_grid g = sample_grid(b, 128);
    const double k = 3.0, eta = 3.0;
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{3, 77},
                        {60, 61}, {100, 10}}) {
        const cplx_split s = helmholtz_combined_split(g, k, eta, i, j);
        const double dt = g.t[i] - g.t[j];
        const double lg = std::log(4.0 * std::sin(dt / 2) * std::sin(dt / 2));
        const cplx full = s.log_part * lg + s.smooth;
        const cplx want = helmholtz_combined(g, k, eta, i, j);
        CHECK(std::abs(full - want) < 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("kelvin split recombines to U |gamma'|") {
    const boundary b = blob();
    const boundary_grid g = sample_grid(b, 128);
    const double G = 2.0, nu = 0.3;
    const std::size_t i = 9, j = 90;
    const mat2_split s = navier_u_split(g, G, nu, i, j);
    const double dt = g.t[i] - g.t[j];
    const double lg = std::log(4.0 * std::sin(dt / 2) * std::sin(dt / 2));
    const mat2 direct = navier_u_free(g.p[i], g.p[j], G, nu);
    CHECK(s.log_part.m00 * lg + s.smooth.m00 ==
          doctest::Approx(direct.m00 * g.sp[j]).epsilon(1e-12));
    CHECK(s.log_part.m01 * lg + s.smooth.m01 ==
          doctest::Approx(direct.m01 * g.sp[j]).epsilon(1e-12));
    CHECK(s.log_part.m11 * lg + s.smooth.m11 ==
          doctest::Approx(direct.m11 * g.sp[j]).epsilon(1e-12));

    const mat2 t_direct = navier_t_free(g.p[i], g.p[j], g.nrm[j], G, nu);
    const mat2 t_kernel = navier_t_kernel(g, G, nu, i, j);
    CHECK(t_kernel.m00 == doctest::Approx(t_direct.m00 * g.sp[j]).epsilon(1e-12));
    CHECK(t_kernel.m10 == doctest::Approx(t_direct.m10 * g.sp[j]).epsilon(1e-12));
}

TEST_CASE("gauss jump identity holds on circles and sampled boundaries") {
    CHECK(gauss_jump_residual(circle(1.0), 256) < 1e-13);
    CHECK(gauss_jump_residual(circle(2.5), 256) < 1e-13);
    CHECK(gauss_jump_residual(blob(), 1024) < 1e-10);

    rng gen(31);
    sampler_params sp;
    for (int i = 0; i < 3; ++i) {
        const boundary b = sample_boundary(gen, sp);
        CHECK(gauss_jump_residual(b, 1024) < 1e-8);
    }
}

TEST_CASE("winding integral classifies interior and exterior points") {
    const boundary b = blob();
    const boundary_grid g = sample_grid(b, 512);
    CHECK(winding_integral(g, {0.1, -0.2}) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(winding_integral(g, {5.0, 4.0}) == doctest::Approx(0.0).epsilon(1e-8));
}
