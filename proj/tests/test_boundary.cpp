#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bie/boundary.hpp"
#include "bie/errors.hpp"

using namespace bie;

namespace {

boundary circle(double r, double cx = 0.0, double cy = 0.0) {
    boundary b;
    b.x = {cx, r, 0.0};
    b.y = {cy, 0.0, r};
    return b;
}

boundary ellipse(double a, double bb) {
    boundary e;
    e.x = {0.0, a, 0.0};
    e.y = {0.0, 0.0, bb};
    return e;
}

}  // namespace

TEST_CASE("circle geometry: point, speed, normal, curvature, area") {
    const double r = 2.0;
    const boundary b = circle(r, 0.5, -1.0);
    for (double t : {0.0, 0.9, 2.5, 4.8}) {
        const vec2 p = b.point(t);
        CHECK(p.x == doctest::Approx(0.5 + r * std::cos(t)));
        CHECK(p.y == doctest::Approx(-1.0 + r * std::sin(t)));
        CHECK(speed(b, t) == doctest::Approx(r));
        const vec2 n = outward_normal(b, t);
        CHECK(n.x == doctest::Approx(std::cos(t)).epsilon(1e-13));
        CHECK(n.y == doctest::Approx(std::sin(t)).epsilon(1e-13));
        CHECK(norm(n) == doctest::Approx(1.0));
        CHECK(curvature(b, t) == doctest::Approx(1.0 / r));
    }
    CHECK(signed_area(b) == doctest::Approx(3.14159265358979324 * r * r));
}

TEST_CASE("ellipse curvature matches the closed form") {
    const double a = 2.0, c = 0.5;
    const boundary e = ellipse(a, c);
    for (double t : {0.0, 0.7, 1.5707963267948966, 3.0}) {
        const double num = a * c;
        const double den = std::pow(a * a * std::sin(t) * std::sin(t) +
                                        c * c * std::cos(t) * std::cos(t),
                                    1.5);
        CHECK(curvature(e, t) == doctest::Approx(num / den).epsilon(1e-12));
    }
}

TEST_CASE("derivative returns the coefficientwise derivative curve") {
    const boundary b = circle(3.0);
    const boundary d = derivative(b);
    for (double t : {0.3, 2.2}) {
        CHECK(d.point(t).x == doctest::Approx(-3.0 * std::sin(t)));
        CHECK(d.point(t).y == doctest::Approx(3.0 * std::cos(t)));
    }
}

TEST_CASE("reverse_orientation flips the signed area") {
    boundary b = circle(1.5);
    const double area = signed_area(b);
    CHECK(area > 0.0);
    reverse_orientation(b);
    CHECK(signed_area(b) == doctest::Approx(-area));
}

TEST_CASE("simplicity filter accepts a circle, rejects a looped limacon") {
    CHECK(is_simple(circle(1.0)));
    // r(t) = 1 + 1.5 cos t has an inner loop (b/a > 1), so the curve
    // self-intersects at the origin:
    //   x = 0.75 + cos t + 0.75 cos 2t,  y = sin t + 0.75 sin 2t
    boundary limacon;
    limacon.x = {0.75, 1.0, 0.75, 0.0, 0.0};
    limacon.y = {0.0, 0.0, 0.0, 1.0, 0.75};
    CHECK_FALSE(is_simple(limacon));
}

TEST_CASE("sample_grid agrees with the pointwise helpers") {
    const boundary b = ellipse(1.4, 0.8);
    const std::size_t Q = 64;
    const boundary_grid g = sample_grid(b, Q);
    REQUIRE(g.Q == Q);
    REQUIRE(g.p.size() == Q);
    for (std::size_t i : {std::size_t(0), std::size_t(13), std::size_t(50)}) {
        const double t = g.t[i];
        CHECK(t == doctest::Approx(two_pi * double(i) / Q));
        CHECK(g.p[i].x == doctest::Approx(b.point(t).x));
        CHECK(g.sp[i] == doctest::Approx(speed(b, t)));
        CHECK(g.nrm[i].x == doctest::Approx(outward_normal(b, t).x));
        CHECK(g.nrm[i].y == doctest::Approx(outward_normal(b, t).y));
        CHECK(g.cur[i] == doctest::Approx(curvature(b, t)));
        CHECK(g.d1[i].y == doctest::Approx(derivative(b).point(t).y));
    }
}

TEST_CASE("raw draws are counterclockwise and orderly") {
    rng gen(17);
    sampler_params sp;
    sp.n = 10;
    for (int i = 0; i < 20; ++i) {
        const boundary b = draw_boundary(gen, sp);
        REQUIRE(b.order() == 10);
        CHECK(signed_area(b) > 0.0);
    }
}

TEST_CASE("accepted boundaries satisfy every filter") {
    rng gen(23);
    sampler_params sp;
    sp.n = 12;
    sp.max_curvature = 10.0;
    sampler_stats st;
    for (int i = 0; i < 10; ++i) {
        const boundary b = sample_boundary(gen, sp, &st);
        CHECK(is_simple(b));
        CHECK(signed_area(b) > 0.0);
        const boundary_grid g = sample_grid(b, 1024);
        double worst = 0.0;
        for (double c : g.cur) worst = std::max(worst, std::fabs(c));
        CHECK(worst <= sp.max_curvature);
        double min_speed = 1e300;
        for (double s : g.sp) min_speed = std::min(min_speed, s);
        CHECK(min_speed >= sp.min_speed);
    }
    CHECK(st.accepted == 10);
    CHECK(st.attempts >= st.accepted);
}

TEST_CASE("sampler draws are deterministic in the seed") {
    sampler_params sp;
    rng g1(99), g2(99);
    const boundary a = sample_boundary(g1, sp);
    const boundary b = sample_boundary(g2, sp);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
}

TEST_CASE("impossible acceptance cap aborts with a divergence error") {
    rng gen(1);
    sampler_params sp;
    sp.max_curvature = 1e-9;  // no smooth closed curve can satisfy this
    CHECK_THROWS_AS((void)sample_boundary(gen, sp, nullptr, 50), error);
    try {
        rng g2(1);
        (void)sample_boundary(g2, sp, nullptr, 50);
    } catch (const error& e) {
        CHECK(e.code() == errc::divergence);
    }
}

TEST_CASE("density sampler shapes and determinism") {
    rng g1(5), g2(5);
    const coeff_vec a = sample_density(g1, 8, 3.0);
    const coeff_vec b = sample_density(g2, 8, 3.0);
    REQUIRE(a.size() == coeff_len(8));
    CHECK(a == b);
    CHECK_THROWS_AS((void)sample_density(g1, 0, 3.0), error);
}
