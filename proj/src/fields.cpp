#include "bie/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "bie/errors.hpp"
#include "bie/trig.hpp"

namespace bie {

lattice_spec bounding_lattice(const boundary& b, double margin,
                              std::size_t nx, std::size_t ny) {
    lattice_spec s;
    s.nx = nx;
    s.ny = ny;
    double lo_x = std::numeric_limits<double>::max(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = hi_x;
    for (double t : uniform_grid(1024)) {
        const vec2 p = b.point(t);
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    s.x0 = lo_x - margin;
    s.x1 = hi_x + margin;
    s.y0 = lo_y - margin;
    s.y1 = hi_y + margin;
    return s;
}

std::vector<vec2> boundary_polyline(const boundary& b, std::size_t samples) {
    require(samples >= 8, errc::invalid_argument,
            "polyline needs at least 8 samples");
    std::vector<vec2> poly(samples);
    for (std::size_t i = 0; i < samples; ++i)
        poly[i] = b.point(two_pi * double(i) / double(samples));
    return poly;
}

double polyline_distance(const std::vector<vec2>& poly, vec2 x) {
    double best = std::numeric_limits<double>::max();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const vec2 a = poly[i], b = poly[(i + 1) % n];
        const double ex = b.x - a.x, ey = b.y - a.y;
        const double len2 = ex * ex + ey * ey;
        double t = 0.0;
        if (len2 > 0.0)
            t = std::clamp(((x.x - a.x) * ex + (x.y - a.y) * ey) / len2, 0.0,
                           1.0);
        const double dx = x.x - (a.x + t * ex), dy = x.y - (a.y + t * ey);
        best = std::min(best, dx * dx + dy * dy);
    }
    return std::sqrt(best);
}

bool point_inside(const std::vector<vec2>& poly, vec2 x) {
    // Even-odd ray crossing; the boundaries in play are simple closed curves.
    bool in = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const vec2 a = poly[i], b = poly[(i + 1) % n];
        if ((a.y > x.y) != (b.y > x.y)) {
            const double cx = a.x + (x.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (cx > x.x) in = !in;
        }
    }
    return in;
}

eval_grid make_grid(const boundary& b, domain_side side,
                    const lattice_spec& spec, double clearance) {
    require(spec.nx >= 2 && spec.ny >= 2, errc::invalid_argument,
            "lattice needs at least 2x2 nodes");
    require(spec.x1 > spec.x0 && spec.y1 > spec.y0, errc::invalid_argument,
            "lattice box is empty");
    require(clearance > 0.0, errc::invalid_argument,
            "clearance must be positive");
    const std::vector<vec2> poly = boundary_polyline(b);
    eval_grid g;
    g.side = side;
    g.clearance = clearance;
    g.nx = spec.nx;
    g.ny = spec.ny;
    for (std::size_t iy = 0; iy < spec.ny; ++iy)
        for (std::size_t ix = 0; ix < spec.nx; ++ix) {
            const vec2 x{
                spec.x0 + (spec.x1 - spec.x0) * double(ix) / double(spec.nx - 1),
                spec.y0 + (spec.y1 - spec.y0) * double(iy) / double(spec.ny - 1)};
            if (point_inside(poly, x) != (side == domain_side::interior))
                continue;
            if (polyline_distance(poly, x) < clearance) continue;
            g.points.push_back(x);
            g.index.push_back(iy * spec.nx + ix);
        }
    return g;
}

namespace {

void check_grid(const problem& p, const eval_grid& grid, domain_side want) {
    require(grid.side == want, errc::invalid_argument,
            "grid side does not match the field representation");
    const std::vector<vec2> poly = boundary_polyline(p.bnd);
    for (const vec2& x : grid.points)
        require(polyline_distance(poly, x) >= grid.clearance - 1e-12,
                errc::invalid_argument, "near-singular evaluation excluded");
}

field_result make_result(const eval_grid& grid, std::size_t components) {
    field_result f;
    f.points = grid.points;
    f.components = components;
    f.values.assign(grid.points.size() * components, 0.0);
    return f;
}

}  // namespace

field_result laplace_field(const problem& p, const coeff_vec& density,
                           const eval_grid& grid, std::size_t Q) {
    enum class rep { dlp, slp, dlp_plus_one } r;
    domain_side want;
    switch (p.kind) {
        case bvp_kind::interior_dirichlet:
            r = rep::dlp;
            want = domain_side::interior;
            break;
        case bvp_kind::interior_neumann:
            r = rep::slp;
            want = domain_side::interior;
            break;
        case bvp_kind::exterior_dirichlet:
            r = rep::dlp_plus_one;
            want = domain_side::exterior;
            break;
        case bvp_kind::exterior_neumann:
            r = rep::slp;
            want = domain_side::exterior;
            break;
        default:
            fail(errc::unsupported,
                 "laplace_field handles the four Laplace families only");
    }
    check_grid(p, grid, want);
    const boundary_grid g = sample_grid(p.bnd, Q);
    const std::vector<double> phi = trig_synth(density, Q);
    const double w = two_pi / double(Q);

    field_result f = make_result(grid, 1);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const vec2 x = grid.points[i];
        double acc = 0.0;
        for (std::size_t q = 0; q < Q; ++q) {
            double ker;
            switch (r) {
                case rep::dlp:
                    ker = laplace_dphi_dny(x, g.p[q], g.nrm[q]);
                    break;
                case rep::slp:
                    ker = laplace_phi(x, g.p[q]);
                    break;
                default:
                    // augmented double layer; the constant matches the
                    // rank-one term of the boundary operator
                    ker = laplace_dphi_dny(x, g.p[q], g.nrm[q]) +
                          1.0 / two_pi;
            }
            acc += ker * phi[q] * g.sp[q];
        }
        f.values[i] = w * acc;
    }
    return f;
}

field_result velocity_field(const problem& p, const coeff_vec& density,
                            const eval_grid& grid, std::size_t Q) {
    require(p.kind == bvp_kind::potential_flow, errc::invalid_argument,
            "velocity_field needs a potential-flow problem");
    check_grid(p, grid, domain_side::exterior);
    const boundary_grid g = sample_grid(p.bnd, Q);
    const std::vector<double> phi = trig_synth(density, Q);
    const double w = two_pi / double(Q);

    field_result f = make_result(grid, 2);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const vec2 x = grid.points[i];
        double vx = p.flow_speed, vy = 0.0;
        for (std::size_t q = 0; q < Q; ++q) {
            const vec2 gr = laplace_grad_x(x, g.p[q]);
            vx += w * gr.x * phi[q] * g.sp[q];
            vy += w * gr.y * phi[q] * g.sp[q];
        }
        f.values[2 * i] = vx;
        f.values[2 * i + 1] = vy;
    }
    return f;
}

field_result elastic_field(const problem& p, const coeff_vec& t1,
                           const coeff_vec& t2, const coeff_vec& v1,
                           const coeff_vec& v2, const eval_grid& grid,
                           std::size_t Q) {
    require(p.kind == bvp_kind::elastostatic, errc::invalid_argument,
            "elastic_field needs an elastostatic problem");
    check_grid(p, grid, domain_side::interior);
    const boundary_grid g = sample_grid(p.bnd, Q);
    const std::vector<double> ts1 = trig_synth(t1, Q), ts2 = trig_synth(t2, Q);
    const std::vector<double> vs1 = trig_synth(v1, Q), vs2 = trig_synth(v2, Q);
    const double w = two_pi / double(Q);

    field_result f = make_result(grid, 2);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const vec2 x = grid.points[i];
        double u1 = 0.0, u2 = 0.0;
        for (std::size_t q = 0; q < Q; ++q) {
            const mat2 U = navier_u_free(x, g.p[q], p.shear, p.poisson);
            const mat2 T =
                navier_t_free(x, g.p[q], g.nrm[q], p.shear, p.poisson);
            const double c = w * g.sp[q];
            u1 += c * (U.m00 * ts1[q] + U.m01 * ts2[q] -
                       (T.m00 * vs1[q] + T.m01 * vs2[q]));
            u2 += c * (U.m10 * ts1[q] + U.m11 * ts2[q] -
                       (T.m10 * vs1[q] + T.m11 * vs2[q]));
        }
        f.values[2 * i] = u1;
        f.values[2 * i + 1] = u2;
    }
    return f;
}

field_result scattered_field(const problem& p, const coeff_vec& density_re,
                             const coeff_vec& density_im,
                             const eval_grid& grid, bool total,
                             std::size_t Q) {
    require(p.kind == bvp_kind::helmholtz, errc::invalid_argument,
            "scattered_field needs a Helmholtz problem");
    check_grid(p, grid, domain_side::exterior);
    const boundary_grid g = sample_grid(p.bnd, Q);
    const std::vector<double> pre = trig_synth(density_re, Q);
    const std::vector<double> pim = trig_synth(density_im, Q);
    const double w = two_pi / double(Q);
    const double k = p.wavenumber, eta = p.eta();

    field_result f = make_result(grid, 2);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const vec2 x = grid.points[i];
        cplx acc(0.0, 0.0);
        for (std::size_t q = 0; q < Q; ++q) {
            const cplx ker = helmholtz_dphi_dny(k, x, g.p[q], g.nrm[q]) -
                             cplx(0.0, eta) * helmholtz_phi(k, x, g.p[q]);
            acc += w * g.sp[q] * ker * cplx(pre[q], pim[q]);
        }
        if (total) acc += plane_wave(k, p.direction, x);
        f.values[2 * i] = acc.real();
        f.values[2 * i + 1] = acc.imag();
    }
    return f;
}

field_result error_map(const field_result& pred, const field_result& ref) {
    require(pred.points.size() == ref.points.size() &&
                pred.components == ref.components &&
                pred.values.size() == ref.values.size(),
            errc::invalid_argument, "error_map: field shapes differ");
    field_result out = pred;
    out.reference = ref.values;
    out.abs_error.assign(pred.points.size(), 0.0);
    for (std::size_t i = 0; i < pred.points.size(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < pred.components; ++c) {
            const double d = pred.values[i * pred.components + c] -
                             ref.values[i * pred.components + c];
            s += d * d;
        }
        out.abs_error[i] = std::sqrt(s);
    }
    return out;
}

void write_field_csv(const std::string& path, const field_result& f) {
    std::ofstream out(path);
    require(out.good(), errc::io_error, "cannot open " + path);
    out << "x,y";
    for (std::size_t c = 0; c < f.components; ++c) out << ",v" << c;
    if (!f.reference.empty())
        for (std::size_t c = 0; c < f.components; ++c) out << ",ref" << c;
    if (!f.abs_error.empty()) out << ",abs_error";
    out << "\n";
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        num(f.points[i].x);
        out << ',';
        num(f.points[i].y);
        for (std::size_t c = 0; c < f.components; ++c) {
            out << ',';
            num(f.values[i * f.components + c]);
        }
        if (!f.reference.empty())
            for (std::size_t c = 0; c < f.components; ++c) {
                out << ',';
                num(f.reference[i * f.components + c]);
            }
        if (!f.abs_error.empty()) {
            out << ',';
            num(f.abs_error[i]);
        }
        out << "\n";
    }
    require(out.good(), errc::io_error, "write failed: " + path);
}

}  // namespace bie
