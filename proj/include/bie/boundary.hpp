#pragma once

#include <cstdint>
#include <vector>

#include "bie/rng.hpp"
#include "bie/trig.hpp"

namespace bie {

struct vec2 {
    double x = 0.0, y = 0.0;
};

inline vec2 operator+(vec2 a, vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline vec2 operator-(vec2 a, vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline vec2 operator*(double s, vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(vec2 a, vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

// Smooth closed curve gamma(t) = (x(t), y(t)), t in [0, 2pi), with both
// components trigonometric polynomials of the same order.
struct boundary {
    coeff_vec x, y;

    std::size_t order() const { return trig_order(x); }
    vec2 point(double t) const { return {trig_eval(x, t), trig_eval(y, t)}; }
};

// First and second derivative curves.
boundary derivative(const boundary& b);

double speed(const boundary& b, double t);

// Outward unit normal for a counterclockwise curve: (y', -x') / |gamma'|.
vec2 outward_normal(const boundary& b, double t);

// Signed curvature (x'y'' - x''y') / |gamma'|^3.
double curvature(const boundary& b, double t);

// Signed enclosed area; positive iff counterclockwise.
double signed_area(const boundary& b);

// Reverse orientation in place (t -> -t: sine coefficients flip sign).
void reverse_orientation(boundary& b);

// True if the 2048-point polyline has no self-intersection: non-adjacent
// segments must stay at least 1e-6 * diameter apart.
bool is_simple(const boundary& b, std::size_t samples = 2048);

// Everything kernels need, precomputed on the uniform Q-grid.
struct boundary_grid {
    std::size_t Q = 0;
    std::vector<double> t;            // nodes
    std::vector<vec2> p;              // gamma(t)
    std::vector<vec2> d1;             // gamma'(t)
    std::vector<double> sp;           // |gamma'|
    std::vector<vec2> nrm;            // outward unit normal
    std::vector<double> cur;          // curvature
};

boundary_grid sample_grid(const boundary& b, std::size_t Q);

struct sampler_params {
    std::size_t n = 20;          // trig order
    double rho = 0.3;            // harmonic decay base, coefficient k ~ N(0, rho^(2(k-1)))
    double max_curvature = 10.0; // acceptance cap, checked on a 1024-grid
    double min_speed = 1e-8;     // rejection threshold, checked on a 1024-grid
};

struct sampler_stats {
    std::uint64_t attempts = 0;
    std::uint64_t accepted = 0;
};

// One raw draw (no acceptance filtering), already counterclockwise.
boundary draw_boundary(rng& gen, const sampler_params& p);

// Rejection-sample until a boundary passes the speed, curvature and
// simplicity filters.  Throws after max_attempts rejections.
boundary sample_boundary(rng& gen, const sampler_params& p,
                         sampler_stats* stats = nullptr,
                         std::uint64_t max_attempts = 100000);

// Random density coefficients: c0 ~ N(0,1), a_k, b_k ~ N(0, k^-m).
coeff_vec sample_density(rng& gen, std::size_t n, double decay_m);

}  // namespace bie
