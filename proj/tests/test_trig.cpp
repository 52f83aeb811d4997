#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bie/errors.hpp"
#include "bie/rng.hpp"
#include "bie/trig.hpp"

using namespace bie;

TEST_CASE("coefficient layout and pointwise evaluation") {
    // f(t) = 2 + 3 cos t - sin t + 0.5 sin 2t
    const coeff_vec c = {2.0, 3.0, 0.0, -1.0, 0.5};
    REQUIRE(trig_order(c) == 2);
    for (double t : {0.0, 0.4, 1.7, 3.9, 6.1}) {
        const double want = 2.0 + 3.0 * std::cos(t) - std::sin(t) +
                            0.5 * std::sin(2.0 * t);
        CHECK(trig_eval(c, t) == doctest::Approx(want).epsilon(1e-15));
    }
    CHECK_THROWS_AS((void)trig_order(coeff_vec{1.0, 2.0}), error);
}

TEST_CASE("synthesis matches evaluation on the uniform grid") {
    const coeff_vec c = {0.5, 1.0, -2.0, 0.25, 0.0, 0.0, 1.5};
    const std::size_t Q = 16;
    const std::vector<double> s = trig_synth(c, Q);
    const std::vector<double> ts = uniform_grid(Q);
    REQUIRE(s.size() == Q);
    REQUIRE(ts[1] == doctest::Approx(two_pi / Q));
    for (std::size_t q = 0; q < Q; ++q)
        CHECK(s[q] == doctest::Approx(trig_eval(c, ts[q])).epsilon(1e-14));
}

TEST_CASE("project inverts synth for resolved orders") {
    rng gen(9);
    coeff_vec c(coeff_len(6));
    for (double& x : c) x = gen.normal();
    const coeff_vec back = trig_project(trig_synth(c, 32), 6);
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(back[i] == doctest::Approx(c[i]).epsilon(1e-13));

    // projecting to a lower order truncates exactly (L2 projection);
    // c is order 6: [c0, a1..a6, b1..b6], low is [c0, a1, a2, b1, b2]
    const coeff_vec low = trig_project(trig_synth(c, 32), 2);
    REQUIRE(low.size() == coeff_len(2));
    CHECK(low[0] == doctest::Approx(c[0]).epsilon(1e-13));
    CHECK(low[1] == doctest::Approx(c[1]).epsilon(1e-13));
    CHECK(low[2] == doctest::Approx(c[2]).epsilon(1e-13));
    CHECK(low[3] == doctest::Approx(c[7]).epsilon(1e-13));
    CHECK(low[4] == doctest::Approx(c[8]).epsilon(1e-13));
}

TEST_CASE("grid size preconditions") {
    const coeff_vec c(coeff_len(4), 0.1);
    CHECK_THROWS_AS((void)trig_synth(c, 12), error);       // not a power of two
    CHECK_THROWS_AS((void)trig_synth(c, 8), error);        // 8 < 2n+2 = 10
    CHECK_NOTHROW((void)trig_synth(c, 16));
    CHECK_THROWS_AS((void)trig_project(std::vector<double>(12, 0.0), 4), error);
}

TEST_CASE("derivative rotates the coefficient pairs") {
    // d/dt [a k cos(kt) + b k sin(kt)] = k b cos(kt) - k a sin(kt)
    const coeff_vec c = {4.0, 1.0, 0.5, 2.0, -1.0};  // n = 2
    const coeff_vec d = trig_derivative(c);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == doctest::Approx(2.0));    // a1' = 1*b1
    CHECK(d[2] == doctest::Approx(-2.0));   // a2' = 2*b2
    CHECK(d[3] == doctest::Approx(-1.0));   // b1' = -1*a1
    CHECK(d[4] == doctest::Approx(-1.0));   // b2' = -2*a2

    const double h = 1e-6, t = 0.7;
    const double fd = (trig_eval(c, t + h) - trig_eval(c, t - h)) / (2 * h);
    CHECK(trig_eval(d, t) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("resize pads and truncates") {
    const coeff_vec c = {1.0, 2.0, 3.0};  // n = 1
    const coeff_vec up = trig_resize(c, 3);
    REQUIRE(up.size() == 7);
    CHECK(up[0] == 1.0);
    CHECK(up[1] == 2.0);
    CHECK(up[2] == 0.0);
    CHECK(up[3] == 0.0);
    CHECK(up[4] == 3.0);
    CHECK(up[5] == 0.0);
    CHECK(up[6] == 0.0);
    const coeff_vec down = trig_resize(up, 1);
    CHECK(down == c);
}

TEST_CASE("L2 inner products use the orthogonality relations") {
    // ||cos t||^2 = pi, ||1||^2 = 2 pi, mixed modes orthogonal
    const coeff_vec one = {1.0};
    const coeff_vec cos1 = {0.0, 1.0, 0.0};
    const coeff_vec sin1 = {0.0, 0.0, 1.0};
    CHECK(trig_l2_inner(one, one) == doctest::Approx(two_pi));
    CHECK(trig_l2_inner(cos1, cos1) == doctest::Approx(two_pi / 2));
    CHECK(trig_l2_inner(cos1, sin1) == doctest::Approx(0.0));
    CHECK(trig_l2_norm(cos1) == doctest::Approx(std::sqrt(two_pi / 2)));
    // orders may differ; the shorter vector is implicitly zero-padded
    CHECK(trig_l2_inner(one, cos1) == doctest::Approx(0.0));
}

TEST_CASE("basis and projector matrices are mutually inverse") {
    const std::size_t n = 5, Q = 16;
    const mat& E = trig_basis(n, Q);
    const mat& P = trig_projector(n, Q);
    REQUIRE(E.rows == Q);
    REQUIRE(E.cols == coeff_len(n));
    REQUIRE(P.rows == coeff_len(n));
    REQUIRE(P.cols == Q);
    // P * E = I on coefficient space
    for (std::size_t i = 0; i < P.rows; ++i)
        for (std::size_t j = 0; j < E.cols; ++j) {
            double acc = 0.0;
            for (std::size_t q = 0; q < Q; ++q) acc += P(i, q) * E(q, j);
            CHECK(acc == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
}

TEST_CASE("default_grid is a power of two that resolves the order") {
    for (std::size_t n : {1u, 4u, 20u, 40u, 100u}) {
        const std::size_t Q = default_grid(n);
        CHECK((Q & (Q - 1)) == 0);
        CHECK(Q >= 2 * n + 2);
    }
}
