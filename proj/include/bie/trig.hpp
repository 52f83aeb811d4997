#pragma once

#include <cstddef>
#include <vector>

#include "bie/linalg.hpp"

namespace bie {

// Real trigonometric polynomial of order n, stored as coefficients
//   [c0, a1..an, b1..bn]  with  f(t) = c0 + sum_k (a_k cos(kt) + b_k sin(kt)).
using coeff_vec = std::vector<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Number of coefficients for order n.
inline std::size_t coeff_len(std::size_t n) { return 2 * n + 1; }

// Order encoded by a coefficient vector; throws if the length is not odd.
std::size_t trig_order(const coeff_vec& c);

// Uniform grid t_q = 2*pi*q/Q, q = 0..Q-1.
std::vector<double> uniform_grid(std::size_t Q);

// Evaluate at one point.
double trig_eval(const coeff_vec& c, double t);

// Evaluate at many points.
std::vector<double> trig_eval(const coeff_vec& c, const std::vector<double>& ts);

// Evaluate on the uniform Q-grid (Q must be a power of two, Q >= 2n+2).
std::vector<double> trig_synth(const coeff_vec& c, std::size_t Q);

// Coefficients of order n from samples on the uniform grid (size Q a power of
// two, Q >= 2n+2).  Exact for trigonometric polynomials of order <= Q/2 - 1.
coeff_vec trig_project(const std::vector<double>& samples, std::size_t n);

// Coefficients of the derivative: a_k' = k b_k, b_k' = -k a_k, c0' = 0.
coeff_vec trig_derivative(const coeff_vec& c);

// Pad or truncate to order n (truncation = L2 projection for this basis).
coeff_vec trig_resize(const coeff_vec& c, std::size_t n);

// L2(0,2pi) inner product and norm of the functions represented by coefficients.
double trig_l2_inner(const coeff_vec& a, const coeff_vec& b);
double trig_l2_norm(const coeff_vec& c);

// Basis sample matrix E (Q x 2n+1): E(q, 0) = 1, E(q, k) = cos(k t_q),
// E(q, n+k) = sin(k t_q).  Cached per (n, Q); do not mutate.
const mat& trig_basis(std::size_t n, std::size_t Q);

// Projection matrix P (2n+1 x Q) with  coeffs = P * samples  on the uniform
// Q-grid: rows are the basis functions scaled by [1/Q, 2/Q, ..., 2/Q].
// Cached per (n, Q); do not mutate.
const mat& trig_projector(std::size_t n, std::size_t Q);

// Quadrature size used for Galerkin assembly and dataset generation.
std::size_t default_grid(std::size_t n);

}  // namespace bie
