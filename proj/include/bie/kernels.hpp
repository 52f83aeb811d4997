#pragma once

#include <complex>

#include "bie/boundary.hpp"

namespace bie {

using cplx = std::complex<double>;

struct mat2 {
    double m00 = 0, m01 = 0, m10 = 0, m11 = 0;
};

// ---- free-space fundamental solutions, evaluated off the boundary ----

// Phi(x, y) = (1/2pi) ln(1/|x-y|)
double laplace_phi(vec2 x, vec2 y);

// grad_x Phi = -(1/2pi) (x-y)/|x-y|^2
vec2 laplace_grad_x(vec2 x, vec2 y);

// dPhi/dn(y) = (1/2pi) (x-y).n(y)/|x-y|^2
double laplace_dphi_dny(vec2 x, vec2 y, vec2 ny);

// Phi_k(x, y) = (i/4) H1_0(k |x-y|)
cplx helmholtz_phi(double k, vec2 x, vec2 y);

// dPhi_k/dn(y) = (ik/4) H1_1(k r) (x-y).n(y)/r
cplx helmholtz_dphi_dny(double k, vec2 x, vec2 y, vec2 ny);

// Plane wave e^{i k d.x}.
cplx plane_wave(double k, vec2 d, vec2 x);

// Plane-strain Kelvin displacement kernel U_ij(x, y).
mat2 navier_u_free(vec2 x, vec2 y, double G, double nu);

// Plane-strain traction kernel T_ij(x, y; n(y)).
mat2 navier_t_free(vec2 x, vec2 y, vec2 ny, double G, double nu);

// ---- parameterized boundary kernels; |gamma'(s_j)| is folded in ----
// All take one boundary grid and node indices (i = target t, j = source s).

// Laplace double layer, continuous across the diagonal:
//   i != j: (1/2pi) (x-y).n(y)/r^2 |gamma'(s)|,  i == j: -cur |gamma'| / (4pi)
double kernel_double_layer(const boundary_grid& g, std::size_t i, std::size_t j);

// Adjoint double layer (normal at the target instead):
//   i != j: -(1/2pi) (x-y).n(x)/r^2 |gamma'(s)|,  same diagonal limit
double kernel_double_layer_adjoint(const boundary_grid& g, std::size_t i,
                                   std::size_t j);

// Double layer plus the rank-one completion |gamma'(s)| used by the exterior
// Dirichlet equation.
double kernel_double_layer_modified(const boundary_grid& g, std::size_t i,
                                    std::size_t j);

// Kernel split against the periodic logarithm:
//   K(t, s) = log_part * ln(4 sin^2((t-s)/2)) + smooth
struct cplx_split {
    cplx log_part, smooth;
};

struct mat2_split {
    mat2 log_part, smooth;
};

// Combined Helmholtz kernel (D - i eta S)(t, s) |gamma'(s)| in split form;
// valid on the diagonal (smooth parts take their limits there).
cplx_split helmholtz_combined_split(const boundary_grid& g, double k, double eta,
                                    std::size_t i, std::size_t j);

// Full combined kernel value; i == j is rejected (the value diverges there).
cplx helmholtz_combined(const boundary_grid& g, double k, double eta,
                        std::size_t i, std::size_t j);

// Kelvin kernel U(t, s) |gamma'(s)| in split form, diagonal included.
mat2_split navier_u_split(const boundary_grid& g, double G, double nu,
                          std::size_t i, std::size_t j);

// Traction kernel T(t, s) |gamma'(s)|; i == j is rejected.
mat2 navier_t_kernel(const boundary_grid& g, double G, double nu, std::size_t i,
                     std::size_t j);

// max over 16 on-boundary collocation nodes of
//   | sum_j w K_D(t_i, s_j) + 1/2 |
// (trapezoid rule on the Q-grid); the integral identity tested by criterion 1.
double gauss_jump_residual(const boundary& b, std::size_t Q);

// Winding integral  ∮ dPhi/dn(y) ds(y)  at an off-boundary point: -1 inside,
// 0 outside (up to quadrature error).
double winding_integral(const boundary_grid& g, vec2 x);

}  // namespace bie
