#include "bie/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "bie/errors.hpp"

namespace bie {

boundary derivative(const boundary& b) {
    return {trig_derivative(b.x), trig_derivative(b.y)};
}

double speed(const boundary& b, double t) {
    const boundary d = derivative(b);
    return norm(d.point(t));
}

vec2 outward_normal(const boundary& b, double t) {
    const boundary d = derivative(b);
    const vec2 v = d.point(t);
    const double s = norm(v);
    require(s > 0.0, errc::invalid_argument, "outward_normal: zero speed");
    return {v.y / s, -v.x / s};
}

double curvature(const boundary& b, double t) {
    const boundary d1 = derivative(b);
    const boundary d2 = derivative(d1);
    const vec2 v = d1.point(t);
    const vec2 a = d2.point(t);
    const double s = norm(v);
    require(s > 0.0, errc::invalid_argument, "curvature: zero speed");
    return (v.x * a.y - v.y * a.x) / (s * s * s);
}

double signed_area(const boundary& b) {
    // A = 1/2 (<x, y'> - <y, x'>) in L2(0, 2pi); exact for this basis.
    const coeff_vec dx = trig_derivative(b.x);
    const coeff_vec dy = trig_derivative(b.y);
    return 0.5 * (trig_l2_inner(b.x, dy) - trig_l2_inner(b.y, dx));
}

void reverse_orientation(boundary& b) {
    const std::size_t n = b.order();
    for (std::size_t k = 1; k <= n; ++k) {
        b.x[n + k] = -b.x[n + k];
        b.y[n + k] = -b.y[n + k];
    }
}

namespace {

// Minimum distance between segments p1-p2 and q1-q2 (0 if they intersect).
double point_segment_dist(vec2 p, vec2 a, vec2 b) {
    const vec2 ab = b - a;
    const double den = dot(ab, ab);
    double u = den > 0.0 ? dot(p - a, ab) / den : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return norm(p - (a + u * ab));
}

double cross(vec2 a, vec2 b) { return a.x * b.y - a.y * b.x; }

double segment_dist(vec2 p1, vec2 p2, vec2 q1, vec2 q2) {
    const double d1 = cross(p2 - p1, q1 - p1);
    const double d2 = cross(p2 - p1, q2 - p1);
    const double d3 = cross(q2 - q1, p1 - q1);
    const double d4 = cross(q2 - q1, p2 - q1);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;
    return std::min(std::min(point_segment_dist(p1, q1, q2),
                             point_segment_dist(p2, q1, q2)),
                    std::min(point_segment_dist(q1, p1, p2),
                             point_segment_dist(q2, p1, p2)));
}

}  // namespace

bool is_simple(const boundary& b, std::size_t samples) {
    require(samples >= 8, errc::invalid_argument, "is_simple: too few samples");
    const std::size_t N = samples;
    std::vector<vec2> p(N);
    vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (std::size_t i = 0; i < N; ++i) {
        p[i] = b.point(two_pi * double(i) / double(N));
        lo.x = std::min(lo.x, p[i].x);
        lo.y = std::min(lo.y, p[i].y);
        hi.x = std::max(hi.x, p[i].x);
        hi.y = std::max(hi.y, p[i].y);
    }
    const double diameter = norm(hi - lo);
    if (!(diameter > 0.0)) return false;
    const double tol = 1e-6 * diameter;

    double max_len = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        max_len = std::max(max_len, norm(p[(i + 1) % N] - p[i]));

    // Bucket segments by midpoint; two segments closer than tol have
    // midpoints within (tol + max_len), so one cell ring suffices.
    const double cell = tol + max_len * 1.0000001;
    const auto cell_of = [&](vec2 q) {
        return std::pair<long, long>{long(std::floor((q.x - lo.x) / cell)),
                                     long(std::floor((q.y - lo.y) / cell))};
    };
    std::vector<std::pair<std::pair<long, long>, std::size_t>> buckets(N);
    for (std::size_t i = 0; i < N; ++i) {
        const vec2 mid = 0.5 * (p[i] + p[(i + 1) % N]);
        buckets[i] = {cell_of(mid), i};
    }
    std::sort(buckets.begin(), buckets.end());

    const auto adjacent = [N](std::size_t i, std::size_t j) {
        const std::size_t d = i > j ? i - j : j - i;
        return d <= 1 || d == N - 1;
    };
    const auto find_cell = [&](std::pair<long, long> key) {
        return std::lower_bound(buckets.begin(), buckets.end(),
                                std::make_pair(key, std::size_t(0)));
    };
    for (std::size_t i = 0; i < N; ++i) {
        const vec2 a1 = p[i], a2 = p[(i + 1) % N];
        const auto [cx, cy] = cell_of(0.5 * (a1 + a2));
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy) {
                const std::pair<long, long> key{cx + dx, cy + dy};
                for (auto it = find_cell(key);
                     it != buckets.end() && it->first == key; ++it) {
                    const std::size_t j = it->second;
                    if (j <= i || adjacent(i, j)) continue;
                    const vec2 b1 = p[j], b2 = p[(j + 1) % N];
                    if (segment_dist(a1, a2, b1, b2) < tol) return false;
                }
            }
    }
    return true;
}

boundary_grid sample_grid(const boundary& b, std::size_t Q) {
    require(Q >= 4 && Q % 2 == 0, errc::invalid_argument,
            "sample_grid: grid size must be even and at least 4");
    const boundary d1 = derivative(b);
    const boundary d2 = derivative(d1);
    boundary_grid g;
    g.Q = Q;
    g.t = uniform_grid(Q);
    g.p.resize(Q);
    g.d1.resize(Q);
    g.sp.resize(Q);
    g.nrm.resize(Q);
    g.cur.resize(Q);
    for (std::size_t q = 0; q < Q; ++q) {
        const double t = g.t[q];
        g.p[q] = b.point(t);
        const vec2 v = d1.point(t);
        const vec2 a = d2.point(t);
        const double s = norm(v);
        require(s > 0.0, errc::invalid_argument, "sample_grid: zero speed node");
        g.d1[q] = v;
        g.sp[q] = s;
        g.nrm[q] = {v.y / s, -v.x / s};
        g.cur[q] = (v.x * a.y - v.y * a.x) / (s * s * s);
    }
    return g;
}

boundary draw_boundary(rng& gen, const sampler_params& p) {
    require(p.n >= 1, errc::invalid_argument, "draw_boundary: order must be >= 1");
    require(p.rho > 0.0 && p.rho < 1.0, errc::invalid_argument,
            "draw_boundary: rho must lie in (0, 1)");
    boundary b;
    for (coeff_vec* comp : {&b.x, &b.y}) {
        comp->assign(coeff_len(p.n), 0.0);
        (*comp)[0] = gen.normal();
        double s = 1.0;  // rho^(k-1)
        for (std::size_t k = 1; k <= p.n; ++k) {
            (*comp)[k] = gen.normal(0.0, s);
            (*comp)[p.n + k] = gen.normal(0.0, s);
            s *= p.rho;
        }
    }
    if (signed_area(b) < 0.0) reverse_orientation(b);
    return b;
}

namespace {

bool passes_filters(const boundary& b, const sampler_params& p) {
    const boundary d1 = derivative(b);
    const boundary d2 = derivative(d1);
    const std::size_t Q = 1024;
    for (std::size_t q = 0; q < Q; ++q) {
        const double t = two_pi * double(q) / double(Q);
        const vec2 v = d1.point(t);
        const double s = norm(v);
        if (!(s > p.min_speed)) return false;
        const vec2 a = d2.point(t);
        const double cur = (v.x * a.y - v.y * a.x) / (s * s * s);
        if (!(std::abs(cur) <= p.max_curvature)) return false;
    }
    return is_simple(b);
}

}  // namespace

boundary sample_boundary(rng& gen, const sampler_params& p, sampler_stats* stats,
                         std::uint64_t max_attempts) {
    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        boundary b = draw_boundary(gen, p);
        if (stats) ++stats->attempts;
        if (passes_filters(b, p)) {
            if (stats) ++stats->accepted;
            return b;
        }
    }
    fail(errc::divergence, "boundary sampler: acceptance rate too low");
}

coeff_vec sample_density(rng& gen, std::size_t n, double decay_m) {
    require(n >= 1, errc::invalid_argument, "sample_density: order must be >= 1");
    coeff_vec c(coeff_len(n), 0.0);
    c[0] = gen.normal();
    for (std::size_t k = 1; k <= n; ++k) {
        const double stdev = std::pow(double(k), -0.5 * decay_m);
        c[k] = gen.normal(0.0, stdev);
        c[n + k] = gen.normal(0.0, stdev);
    }
    return c;
}

}  // namespace bie
