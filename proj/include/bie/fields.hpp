#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bie/assembly.hpp"
#include "bie/boundary.hpp"
#include "bie/kernels.hpp"

namespace bie {

enum class domain_side { interior, exterior };

// Off-boundary evaluation points.  Every point must keep at least
// `clearance` distance from the boundary polyline; the field operations
// re-check this and refuse near-singular points.  nx/ny/index describe the
// generating lattice when the grid came from make_grid (index[i] is the
// row-major lattice cell of point i), so results can be rasterized.
struct eval_grid {
    std::vector<vec2> points;
    domain_side side = domain_side::interior;
    double clearance = 0.1;
    std::size_t nx = 0, ny = 0;
    std::vector<std::size_t> index;
};

struct lattice_spec {
    double x0 = -2.0, x1 = 2.0, y0 = -2.0, y1 = 2.0;
    std::size_t nx = 64, ny = 64;
};

// Axis-aligned box enclosing the boundary with the given margin.
lattice_spec bounding_lattice(const boundary& b, double margin,
                              std::size_t nx, std::size_t ny);

// Closed polyline sampled from the boundary; shared by the clearance and
// point-classification helpers.
std::vector<vec2> boundary_polyline(const boundary& b,
                                    std::size_t samples = 2048);
double polyline_distance(const std::vector<vec2>& poly, vec2 x);
bool point_inside(const std::vector<vec2>& poly, vec2 x);  // winding number

// Lattice points on the requested side with polyline distance >= clearance.
eval_grid make_grid(const boundary& b, domain_side side,
                    const lattice_spec& spec, double clearance = 0.1);

// Field samples: `components` doubles per point (1 scalar, 2 for vectors or
// complex re/im pairs).  reference/abs_error are filled by error_map.
struct field_result {
    std::vector<vec2> points;
    std::size_t components = 1;
    std::vector<double> values;     // points.size() * components
    std::vector<double> reference;  // empty or same shape as values
    std::vector<double> abs_error;  // empty or one entry per point
};

// Harmonic field from a boundary density by trapezoid quadrature of the
// representation matching the problem kind: double layer for the interior
// Dirichlet problem, single layer for both Neumann problems, and the
// augmented double layer (kernel + 1/2pi) for the exterior Dirichlet problem.
// Off-boundary integrands are smooth, so the trapezoid rule converges
// spectrally.
field_result laplace_field(const problem& p, const coeff_vec& density,
                           const eval_grid& grid, std::size_t Q = 1024);

// v(x) = (v0, 0) + grad S phi(x); the gradient of the log kernel is applied
// analytically under the quadrature sum.
field_result velocity_field(const problem& p, const coeff_vec& density,
                            const eval_grid& grid, std::size_t Q = 1024);

// u_a(x) = int U_ab(x,y) t_b(y) ds - int T_ab(x,y) v_b(y) ds with the
// plane-strain fundamental pair (U, T).
field_result elastic_field(const problem& p, const coeff_vec& t1,
                           const coeff_vec& t2, const coeff_vec& v1,
                           const coeff_vec& v2, const eval_grid& grid,
                           std::size_t Q = 1024);

// u_s(x) = int { d Phi_k / d nu(y) - i eta Phi_k } phi(y) ds(y); with
// `total` set the incident plane wave is added.
field_result scattered_field(const problem& p, const coeff_vec& density_re,
                             const coeff_vec& density_im,
                             const eval_grid& grid, bool total = false,
                             std::size_t Q = 1024);

// Copies pred, attaches ref as reference and the pointwise absolute error
// (vector/complex magnitude of the difference).
field_result error_map(const field_result& pred, const field_result& ref);

// CSV rows "x,y,v0[,v1][,ref...][,abs_error]".
void write_field_csv(const std::string& path, const field_result& f);

}  // namespace bie
