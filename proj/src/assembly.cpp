#include "bie/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "bie/errors.hpp"
#include "bie/quadrature.hpp"
#include "bie/trig.hpp"

namespace bie {

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;

bool is_pow2(std::size_t q) { return q != 0 && (q & (q - 1)) == 0; }

bool scalar_kind(bvp_kind k) {
    return k == bvp_kind::interior_dirichlet || k == bvp_kind::interior_neumann ||
           k == bvp_kind::exterior_dirichlet || k == bvp_kind::exterior_neumann ||
           k == bvp_kind::potential_flow;
}

// Signed kernel of the second-kind operator K so that the system reads
// (I - K) phi = rhs.
double signed_scalar_kernel(bvp_kind kind, const boundary_grid& g, std::size_t i,
                            std::size_t j) {
    switch (kind) {
        case bvp_kind::interior_dirichlet:
            return 2.0 * kernel_double_layer(g, i, j);
        case bvp_kind::interior_neumann:
            return -2.0 * kernel_double_layer_adjoint(g, i, j);
        case bvp_kind::exterior_dirichlet:
            return -2.0 * kernel_double_layer_modified(g, i, j);
        case bvp_kind::exterior_neumann:
        case bvp_kind::potential_flow:
            return 2.0 * kernel_double_layer_adjoint(g, i, j);
        default:
            fail(errc::invalid_argument, "signed kernel: not a scalar family");
    }
}

double rhs_sign(bvp_kind kind) {
    switch (kind) {
        case bvp_kind::interior_dirichlet:
        case bvp_kind::exterior_neumann:
            return -2.0;
        case bvp_kind::interior_neumann:
        case bvp_kind::exterior_dirichlet:
            return 2.0;
        default:
            fail(errc::invalid_argument, "rhs sign: not a scalar data family");
    }
}

std::vector<double> residual(const mat& A, const std::vector<double>& x,
                             const std::vector<double>& b) {
    std::vector<double> r = matvec(A, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

std::vector<cplx> residual(const cmat& A, const std::vector<cplx>& x,
                           const std::vector<cplx>& b) {
    std::vector<cplx> r = matvec(A, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

// LU solve with one step of iterative refinement and a residual guard.
std::vector<double> guarded_solve(const mat& A, const std::vector<double>& b) {
    const double nb = norm2(b);
    if (nb == 0.0) return std::vector<double>(b.size(), 0.0);
    std::vector<double> x = lu_solve(A, b);
    std::vector<double> r = residual(A, x, b);
    const std::vector<double> dx = lu_solve(A, r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    r = residual(A, x, b);
    require(norm2(r) <= 1e-10 * nb, errc::discretization_singular,
            "solve: residual exceeds 1e-10 of the data norm");
    return x;
}

std::vector<cplx> guarded_solve(const cmat& A, const std::vector<cplx>& b) {
    const double nb = norm2(b);
    if (nb == 0.0) return std::vector<cplx>(b.size(), cplx{});
    std::vector<cplx> x = lu_solve(A, b);
    std::vector<cplx> r = residual(A, x, b);
    const std::vector<cplx> dx = lu_solve(A, r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    r = residual(A, x, b);
    require(norm2(r) <= 1e-10 * nb, errc::discretization_singular,
            "solve: residual exceeds 1e-10 of the data norm");
    return x;
}

// Unit null vector of A (or A^T) by inverse iteration on A + eps I.
std::vector<double> null_vector(const mat& A, bool transposed) {
    const std::size_t n = A.rows;
    const double eps = 1e-10 * std::max(max_abs(A), 1e-300);
    mat B = transposed ? transpose(A) : A;
    for (std::size_t i = 0; i < n; ++i) B(i, i) += eps;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = 1.0 + 0.3 * std::sin(3.7 * double(i + 1));
    for (int iter = 0; iter < 3; ++iter) {
        z = lu_solve(B, z, 1e300);
        const double nz = norm2(z);
        require(nz > 0.0, errc::discretization_singular,
                "null vector: inverse iteration collapsed");
        for (auto& v : z) v /= nz;
    }
    // Verify: A z must be small relative to the matrix scale.  The smallest
    // singular value of a truncated Galerkin system is the tail of the
    // continuous null density, so the gate only rejects matrices that are
    // not close to singular at all (regular second-kind systems sit at O(1)).
    std::vector<double> az =
        transposed ? matvec(transpose(A), z) : matvec(A, z);
    require(norm2(az) <= 1e-3 * std::max(max_abs(A), 1e-300) * std::sqrt(double(n)),
            errc::discretization_singular,
            "null vector: matrix is not rank-deficient as expected");
    return z;
}

}  // namespace

const char* bvp_kind_name(bvp_kind k) {
    switch (k) {
        case bvp_kind::interior_dirichlet: return "interior_dirichlet";
        case bvp_kind::interior_neumann: return "interior_neumann";
        case bvp_kind::exterior_dirichlet: return "exterior_dirichlet";
        case bvp_kind::exterior_neumann: return "exterior_neumann";
        case bvp_kind::potential_flow: return "potential_flow";
        case bvp_kind::elastostatic: return "elastostatic";
        case bvp_kind::helmholtz: return "helmholtz";
    }
    fail(errc::invalid_argument, "unknown problem kind");
}

bvp_kind bvp_kind_from_name(const std::string& name) {
    for (bvp_kind k :
         {bvp_kind::interior_dirichlet, bvp_kind::interior_neumann,
          bvp_kind::exterior_dirichlet, bvp_kind::exterior_neumann,
          bvp_kind::potential_flow, bvp_kind::elastostatic, bvp_kind::helmholtz})
        if (name == bvp_kind_name(k)) return k;
    fail(errc::invalid_argument, "unknown problem kind: " + name);
}

grid_plan plan_grids(std::size_t n, std::size_t Q) {
    require(n >= 1, errc::invalid_argument, "plan_grids: order must be >= 1");
    grid_plan pl;
    pl.Qt = 512;
    while (pl.Qt < 2 * n + 2) pl.Qt *= 2;
    pl.stride = Q ? (Q + pl.Qt - 1) / pl.Qt : 1;
    pl.Qs = pl.stride * pl.Qt;
    return pl;
}

mat assemble_operator(const problem& p, std::size_t n, std::size_t Q) {
    require(scalar_kind(p.kind), errc::invalid_argument,
            "assemble_operator: scalar families only");
    const grid_plan pl = plan_grids(n, Q);
    const boundary_grid g = sample_grid(p.bnd, pl.Qs);
    const std::size_t m = coeff_len(n);

    mat K(pl.Qt, pl.Qs);
    const double w = trapezoid_weight(pl.Qs);
    for (std::size_t i = 0; i < pl.Qt; ++i)
        for (std::size_t q = 0; q < pl.Qs; ++q)
            K(i, q) = w * signed_scalar_kernel(p.kind, g, i * pl.stride, q);

    const mat V = matmul(K, trig_basis(n, pl.Qs));       // Qt x m
    return matmul(trig_projector(n, pl.Qt), V);          // m x m
}

galerkin_system assemble_galerkin(const problem& p, std::size_t n, std::size_t Q) {
    galerkin_system sys;
    sys.kind = p.kind;
    sys.n = n;
    const std::size_t m = coeff_len(n);

    if (scalar_kind(p.kind)) {
        sys.A = assemble_operator(p, n, Q);
        for (auto& v : sys.A.a) v = -v;
        for (std::size_t i = 0; i < m; ++i) sys.A(i, i) += 1.0;
        return sys;
    }

    const grid_plan pl = plan_grids(n, Q);
    const boundary_grid g = sample_grid(p.bnd, pl.Qs);
    const std::vector<double>& R = kress_weights(pl.Qs);
    const double w = trapezoid_weight(pl.Qs);
    const mat& E = trig_basis(n, pl.Qs);
    const mat& P = trig_projector(n, pl.Qt);

    if (p.kind == bvp_kind::helmholtz) {
        require(p.wavenumber > 0.0, errc::invalid_argument,
                "helmholtz: wavenumber must be > 0");
        sys.is_complex = true;
        mat Wre(pl.Qt, pl.Qs), Wim(pl.Qt, pl.Qs);
        const double eta = p.eta();
        for (std::size_t i = 0; i < pl.Qt; ++i) {
            const std::size_t it = i * pl.stride;
            for (std::size_t q = 0; q < pl.Qs; ++q) {
                const cplx_split s =
                    helmholtz_combined_split(g, p.wavenumber, eta, it, q);
                const std::size_t d = (it + pl.Qs - q) % pl.Qs;
                const cplx v = -2.0 * (R[d] * s.log_part + w * s.smooth);
                Wre(i, q) = v.real();
                Wim(i, q) = v.imag();
            }
        }
        const mat Mre = matmul(P, matmul(Wre, E));
        const mat Mim = matmul(P, matmul(Wim, E));
        sys.Ac = cmat(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                sys.Ac(i, j) = cplx((i == j ? 1.0 : 0.0) - Mre(i, j), -Mim(i, j));
        return sys;
    }

    require(p.kind == bvp_kind::elastostatic, errc::invalid_argument,
            "assemble_galerkin: unsupported kind");
    // First-kind block Galerkin matrix of the Kelvin kernel.
    mat W00(pl.Qt, pl.Qs), W01(pl.Qt, pl.Qs), W10(pl.Qt, pl.Qs), W11(pl.Qt, pl.Qs);
    for (std::size_t i = 0; i < pl.Qt; ++i) {
        const std::size_t it = i * pl.stride;
        for (std::size_t q = 0; q < pl.Qs; ++q) {
            const mat2_split s = navier_u_split(g, p.shear, p.poisson, it, q);
            const std::size_t d = (it + pl.Qs - q) % pl.Qs;
            W00(i, q) = R[d] * s.log_part.m00 + w * s.smooth.m00;
            W01(i, q) = R[d] * s.log_part.m01 + w * s.smooth.m01;
            W10(i, q) = R[d] * s.log_part.m10 + w * s.smooth.m10;
            W11(i, q) = R[d] * s.log_part.m11 + w * s.smooth.m11;
        }
    }
    const mat B00 = matmul(P, matmul(W00, E));
    const mat B01 = matmul(P, matmul(W01, E));
    const mat B10 = matmul(P, matmul(W10, E));
    const mat B11 = matmul(P, matmul(W11, E));
    sys.A = mat(2 * m, 2 * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            sys.A(i, j) = B00(i, j);
            sys.A(i, m + j) = B01(i, j);
            sys.A(m + i, j) = B10(i, j);
            sys.A(m + i, m + j) = B11(i, j);
        }
    return sys;
}

std::vector<double> rhs_scalar(const problem& p, const coeff_vec& f,
                               std::size_t n) {
    const double s = rhs_sign(p.kind);
    coeff_vec out = trig_resize(f, n);
    for (auto& v : out) v *= s;
    return out;
}

std::vector<double> rhs_potential_flow(const problem& p, std::size_t n,
                                       std::size_t Q) {
    require(p.kind == bvp_kind::potential_flow, errc::invalid_argument,
            "rhs_potential_flow: wrong kind");
    const grid_plan pl = plan_grids(n, Q);
    const boundary_grid g = sample_grid(p.bnd, pl.Qt);
    std::vector<double> vals(pl.Qt);
    for (std::size_t i = 0; i < pl.Qt; ++i)
        vals[i] = 2.0 * p.flow_speed * g.nrm[i].x;
    return matvec(trig_projector(n, pl.Qt), vals);
}

namespace {

// Boundary limit (1/2) v + pv int T v at one node, regularized as
// int_{t}^{t+2pi} T(x(t), y(s)) [v(s) - v(t)] ds: the traction kernel obeys
// pv int T ds = -1/2 I on a smooth boundary, which cancels the free term and
// leaves a bounded integrand.  Rigid motions map to zero, matching a
// traction-free interior state.
vec2 elastostatic_rhs_value(const problem& p, const coeff_vec& v1,
                            const coeff_vec& v2, const boundary& d1, double t) {
    const vec2 x = p.bnd.point(t);
    const vec2 vt{trig_eval(v1, t), trig_eval(v2, t)};
    const auto integrand_x = [&](double s) {
        const vec2 y = p.bnd.point(s);
        const vec2 dy = d1.point(s);
        const double sp = norm(dy);
        const vec2 ny{dy.y / sp, -dy.x / sp};
        const mat2 T = navier_t_free(x, y, ny, p.shear, p.poisson);
        const vec2 dv{trig_eval(v1, s) - vt.x, trig_eval(v2, s) - vt.y};
        return vec2{(T.m00 * dv.x + T.m01 * dv.y) * sp,
                    (T.m10 * dv.x + T.m11 * dv.y) * sp};
    };
    const double a = t + 1e-14, b = t + two_pi - 1e-14;
    const double ix = integrate_panels(
        [&](double s) { return integrand_x(s).x; }, a, b, 64, 16);
    const double iy = integrate_panels(
        [&](double s) { return integrand_x(s).y; }, a, b, 64, 16);
    return {ix, iy};
}

}  // namespace

std::vector<double> rhs_elastostatic(const problem& p, const coeff_vec& v1,
                                     const coeff_vec& v2, std::size_t n,
                                     std::size_t Q) {
    require(p.kind == bvp_kind::elastostatic, errc::invalid_argument,
            "rhs_elastostatic: wrong kind");
    const grid_plan pl = plan_grids(n, Q);
    const boundary d1 = derivative(p.bnd);
    std::vector<double> c1(pl.Qt), c2(pl.Qt);
    for (std::size_t i = 0; i < pl.Qt; ++i) {
        const double t = two_pi * double(i) / double(pl.Qt);
        const vec2 v = elastostatic_rhs_value(p, v1, v2, d1, t);
        c1[i] = v.x;
        c2[i] = v.y;
    }
    const mat& P = trig_projector(n, pl.Qt);
    const std::vector<double> a = matvec(P, c1);
    const std::vector<double> b = matvec(P, c2);
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::vector<cplx> rhs_helmholtz(const problem& p, std::size_t n, std::size_t Q) {
    require(p.kind == bvp_kind::helmholtz, errc::invalid_argument,
            "rhs_helmholtz: wrong kind");
    const grid_plan pl = plan_grids(n, Q);
    std::vector<double> re(pl.Qt), im(pl.Qt);
    for (std::size_t i = 0; i < pl.Qt; ++i) {
        const double t = two_pi * double(i) / double(pl.Qt);
        const cplx v = -2.0 * plane_wave(p.wavenumber, p.direction, p.bnd.point(t));
        re[i] = v.real();
        im[i] = v.imag();
    }
    const mat& P = trig_projector(n, pl.Qt);
    const std::vector<double> cre = matvec(P, re);
    const std::vector<double> cim = matvec(P, im);
    std::vector<cplx> out(cre.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {cre[i], cim[i]};
    return out;
}

std::vector<double> coeff_gram_diagonal(std::size_t n) {
    std::vector<double> w(coeff_len(n), pi);
    w[0] = two_pi;
    return w;
}

std::vector<double> deflated_solve(const mat& A, const std::vector<double>& b,
                                   const std::vector<double>& w_diag) {
    const std::size_t n = A.rows;
    require(A.cols == n && b.size() == n && w_diag.size() == n,
            errc::invalid_argument, "deflated_solve: dimension mismatch");
    const std::vector<double> z = null_vector(A, false);
    const std::vector<double> y = null_vector(A, true);

    // The function-space direction spanning the complement of the range.
    std::vector<double> wc(n);
    for (std::size_t i = 0; i < n; ++i) wc[i] = y[i] / w_diag[i];
    const double nwc = norm2(wc);
    for (auto& v : wc) v /= nwc;

    mat B(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) B(i, j) = A(i, j);
        B(i, n) = wc[i];
        B(n, i) = w_diag[i] * z[i];
    }
    B(n, n) = 0.0;
    std::vector<double> rhs(b);
    rhs.push_back(0.0);

    std::vector<double> xl = lu_solve(B, rhs);
    // one refinement pass on the bordered system
    std::vector<double> r = matvec(B, xl);
    for (std::size_t i = 0; i <= n; ++i) r[i] = rhs[i] - r[i];
    const std::vector<double> dx = lu_solve(B, r);
    for (std::size_t i = 0; i <= n; ++i) xl[i] += dx[i];

    std::vector<double> x(xl.begin(), xl.begin() + n);
    const double mu = xl[n];
    // the solved system is A x = b - mu wc; verify that part was consistent
    std::vector<double> res = matvec(A, x);
    double rn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = b[i] - mu * wc[i] - res[i];
        rn += d * d;
    }
    const double nb = norm2(b);
    require(std::sqrt(rn) <= 1e-10 * std::max(nb, 1e-300),
            errc::discretization_singular,
            "deflated solve: residual exceeds 1e-10 of the data norm");
    return x;
}

coeff_vec canonicalize_neumann_density(const galerkin_system& sys,
                                       const coeff_vec& phi) {
    require(sys.kind == bvp_kind::interior_neumann, errc::invalid_argument,
            "canonicalize_neumann_density: interior Neumann systems only");
    const std::vector<double> z = null_vector(sys.A, false);
    const std::vector<double> w = coeff_gram_diagonal(sys.n);
    coeff_vec out = trig_resize(phi, sys.n);
    double zz = 0.0, pz = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        zz += w[i] * z[i] * z[i];
        pz += w[i] * out[i] * z[i];
    }
    const double c = pz / zz;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * z[i];
    return out;
}

std::vector<double> solve_galerkin(const galerkin_system& sys,
                                   const std::vector<double>& rhs) {
    require(!sys.is_complex, errc::invalid_argument,
            "solve_galerkin: this system is complex");
    require(rhs.size() == sys.A.rows, errc::invalid_argument,
            "solve_galerkin: right-hand side has the wrong length");
    if (sys.kind == bvp_kind::interior_neumann)
        return deflated_solve(sys.A, rhs, coeff_gram_diagonal(sys.n));
    return guarded_solve(sys.A, rhs);
}

std::vector<cplx> solve_galerkin(const galerkin_system& sys,
                                 const std::vector<cplx>& rhs) {
    require(sys.is_complex, errc::invalid_argument,
            "solve_galerkin: this system is real");
    require(rhs.size() == sys.Ac.rows, errc::invalid_argument,
            "solve_galerkin: right-hand side has the wrong length");
    return guarded_solve(sys.Ac, rhs);
}

namespace {

void check_nystrom_grid(std::size_t Q) {
    require(is_pow2(Q) && Q >= 256, errc::invalid_argument,
            "nystrom: grid size must be a power of two >= 256");
}

}  // namespace

std::vector<double> solve_nystrom_scalar(const problem& p, const coeff_vec& f,
                                         std::size_t Q) {
    check_nystrom_grid(Q);
    require(scalar_kind(p.kind) && p.kind != bvp_kind::potential_flow,
            errc::invalid_argument, "solve_nystrom_scalar: wrong kind");
    const boundary_grid g = sample_grid(p.bnd, Q);
    const double w = trapezoid_weight(Q);
    mat A(Q, Q);
    for (std::size_t i = 0; i < Q; ++i)
        for (std::size_t j = 0; j < Q; ++j)
            A(i, j) =
                (i == j ? 1.0 : 0.0) - w * signed_scalar_kernel(p.kind, g, i, j);
    const double s = rhs_sign(p.kind);
    std::vector<double> b(Q);
    for (std::size_t i = 0; i < Q; ++i) b[i] = s * trig_eval(f, g.t[i]);
    if (p.kind == bvp_kind::interior_neumann)
        return deflated_solve(A, b, std::vector<double>(Q, 1.0));
    return guarded_solve(A, b);
}

std::vector<double> solve_nystrom_potential_flow(const problem& p,
                                                 std::size_t Q) {
    check_nystrom_grid(Q);
    require(p.kind == bvp_kind::potential_flow, errc::invalid_argument,
            "solve_nystrom_potential_flow: wrong kind");
    const boundary_grid g = sample_grid(p.bnd, Q);
    const double w = trapezoid_weight(Q);
    mat A(Q, Q);
    for (std::size_t i = 0; i < Q; ++i)
        for (std::size_t j = 0; j < Q; ++j)
            A(i, j) =
                (i == j ? 1.0 : 0.0) - w * signed_scalar_kernel(p.kind, g, i, j);
    std::vector<double> b(Q);
    for (std::size_t i = 0; i < Q; ++i) b[i] = 2.0 * p.flow_speed * g.nrm[i].x;
    return guarded_solve(A, b);
}

std::vector<double> solve_nystrom_elastostatic(const problem& p,
                                               const coeff_vec& v1,
                                               const coeff_vec& v2,
                                               std::size_t Q) {
    check_nystrom_grid(Q);
    require(p.kind == bvp_kind::elastostatic, errc::invalid_argument,
            "solve_nystrom_elastostatic: wrong kind");
    const boundary_grid g = sample_grid(p.bnd, Q);
    const std::vector<double>& R = kress_weights(Q);
    const double w = trapezoid_weight(Q);
    mat A(2 * Q, 2 * Q);
    for (std::size_t i = 0; i < Q; ++i)
        for (std::size_t j = 0; j < Q; ++j) {
            const mat2_split s = navier_u_split(g, p.shear, p.poisson, i, j);
            const std::size_t d = (i + Q - j) % Q;
            A(i, j) = R[d] * s.log_part.m00 + w * s.smooth.m00;
            A(i, Q + j) = R[d] * s.log_part.m01 + w * s.smooth.m01;
            A(Q + i, j) = R[d] * s.log_part.m10 + w * s.smooth.m10;
            A(Q + i, Q + j) = R[d] * s.log_part.m11 + w * s.smooth.m11;
        }
    const boundary d1 = derivative(p.bnd);
    std::vector<double> b(2 * Q);
    for (std::size_t i = 0; i < Q; ++i) {
        const vec2 v = elastostatic_rhs_value(p, v1, v2, d1, g.t[i]);
        b[i] = v.x;
        b[Q + i] = v.y;
    }
    return guarded_solve(A, b);
}

std::vector<cplx> solve_nystrom_helmholtz(const problem& p, std::size_t Q) {
    check_nystrom_grid(Q);
    require(p.kind == bvp_kind::helmholtz, errc::invalid_argument,
            "solve_nystrom_helmholtz: wrong kind");
    require(p.wavenumber > 0.0, errc::invalid_argument,
            "helmholtz: wavenumber must be > 0");
    const boundary_grid g = sample_grid(p.bnd, Q);
    const std::vector<double>& R = kress_weights(Q);
    const double w = trapezoid_weight(Q);
    const double eta = p.eta();
    cmat A(Q, Q);
    for (std::size_t i = 0; i < Q; ++i)
        for (std::size_t j = 0; j < Q; ++j) {
            const cplx_split s =
                helmholtz_combined_split(g, p.wavenumber, eta, i, j);
            const std::size_t d = (i + Q - j) % Q;
            const cplx k = -2.0 * (R[d] * s.log_part + w * s.smooth);
            A(i, j) = (i == j ? 1.0 : 0.0) - k;
        }
    std::vector<cplx> b(Q);
    for (std::size_t i = 0; i < Q; ++i)
        b[i] = -2.0 * plane_wave(p.wavenumber, p.direction, g.p[i]);
    return guarded_solve(A, b);
}

}  // namespace bie
