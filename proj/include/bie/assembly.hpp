#pragma once

#include <cstddef>
#include <vector>

#include "bie/boundary.hpp"
#include "bie/kernels.hpp"
#include "bie/linalg.hpp"

namespace bie {

enum class bvp_kind {
    interior_dirichlet,   // (I - 2D) phi = -2 f
    interior_neumann,     // (I + 2D') phi = +2 f   (rank-1 deficient)
    exterior_dirichlet,   // (I + 2Dm) phi = +2 f   (Dm = D + rank-one)
    exterior_neumann,     // (I - 2D') phi = -2 f
    potential_flow,       // exterior Neumann with f = -v0 n1
    elastostatic,         // first kind: U t = (1/2 I - T) v
    helmholtz             // (I + 2D - 2 i eta S) phi = -2 u_inc
};

const char* bvp_kind_name(bvp_kind k);
bvp_kind bvp_kind_from_name(const std::string& name);

struct problem {
    bvp_kind kind = bvp_kind::interior_dirichlet;
    boundary bnd;
    double wavenumber = 5.0;    // helmholtz k
    double coupling = 0.0;      // helmholtz eta; <= 0 means eta = k
    vec2 direction{1.0, 0.0};   // incident plane-wave direction
    double shear = 1.0;         // elastostatic G
    double poisson = 0.3;       // elastostatic nu
    double flow_speed = 1.0;    // potential-flow v0

    double eta() const { return coupling > 0.0 ? coupling : wavenumber; }
};

// Galerkin discretization in the real trigonometric basis of order n.  For
// the second-kind families the matrix is I - M with M the operator matrix of
// the signed kernel; for the elastostatic first-kind system it is the block
// Galerkin matrix of U (size 2(2n+1)); for helmholtz it is complex.
struct galerkin_system {
    bvp_kind kind = bvp_kind::interior_dirichlet;
    std::size_t n = 0;
    bool is_complex = false;
    mat A;
    cmat Ac;
};

// Internal grid plan: the target grid (power of two, >= max(2n+2, 512)) is a
// sub-grid of the source grid (a multiple of it, >= the requested Q), so
// target nodes coincide exactly with source nodes.  Q = 0 requests the
// default (source = target).
struct grid_plan {
    std::size_t Qt = 0, Qs = 0, stride = 1;
};
grid_plan plan_grids(std::size_t n, std::size_t Q);

// Operator matrix M of the signed kernel (scalar second-kind families only).
mat assemble_operator(const problem& p, std::size_t n, std::size_t Q);

galerkin_system assemble_galerkin(const problem& p, std::size_t n, std::size_t Q);

// Right-hand sides in coefficient space.
// Scalar families: +/- 2 f, with f resized to order n.
std::vector<double> rhs_scalar(const problem& p, const coeff_vec& f,
                               std::size_t n);
// Potential flow: projection of 2 v0 n1(t).
std::vector<double> rhs_potential_flow(const problem& p, std::size_t n,
                                       std::size_t Q);
// Elastostatic: coefficients of int T(t,s)[v(s) - v(t)] ds (the regularized
// boundary limit of v/2 + pv int T v), the two components stacked
// [comp1; comp2].  Rigid motions map to zero.
std::vector<double> rhs_elastostatic(const problem& p, const coeff_vec& v1,
                                     const coeff_vec& v2, std::size_t n,
                                     std::size_t Q);
// Helmholtz: projection of -2 exp(i k d.gamma(t)).
std::vector<cplx> rhs_helmholtz(const problem& p, std::size_t n, std::size_t Q);

// Direct solves.  Second-kind families use LU with a condition-estimate guard;
// the interior Neumann system is solved by nullspace deflation and returns the
// minimum-L2-norm solution of the consistent part of the data.
std::vector<double> solve_galerkin(const galerkin_system& sys,
                                   const std::vector<double>& rhs);
std::vector<cplx> solve_galerkin(const galerkin_system& sys,
                                 const std::vector<cplx>& rhs);

// Nystrom route on the uniform Q-grid (Q a power of two >= 256): trapezoid
// rule for smooth kernels, spectral log-quadrature for singular ones,
// collocation at the nodes.  Returns nodal density values.
std::vector<double> solve_nystrom_scalar(const problem& p, const coeff_vec& f,
                                         std::size_t Q);
std::vector<double> solve_nystrom_potential_flow(const problem& p, std::size_t Q);
// Returns the two traction components stacked [comp1; comp2] (2Q values).
std::vector<double> solve_nystrom_elastostatic(const problem& p,
                                               const coeff_vec& v1,
                                               const coeff_vec& v2,
                                               std::size_t Q);
std::vector<cplx> solve_nystrom_helmholtz(const problem& p, std::size_t Q);

// Minimum-norm solve of a singular system with a one-dimensional nullspace.
// w_diag holds the diagonal of the inner-product weights defining both the
// minimized norm and the projection that removes inconsistent data.
std::vector<double> deflated_solve(const mat& A, const std::vector<double>& b,
                                   const std::vector<double>& w_diag);

// Canonical representative of an interior Neumann density: removes the
// component along the nullspace of the order-n Galerkin system.
coeff_vec canonicalize_neumann_density(const galerkin_system& sys,
                                       const coeff_vec& phi);

// Diagonal of the L2(0,2pi) Gram matrix in the coefficient basis.
std::vector<double> coeff_gram_diagonal(std::size_t n);

}  // namespace bie
