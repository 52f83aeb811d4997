#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace bie {

// Weights R[d] for the product rule
//   int_0^{2pi} ln(4 sin^2((t-s)/2)) f(s) ds  ~=  sum_j R[(i-j) mod Q] f(s_j)
// with t = t_i and s_j both on the uniform Q-grid (Q even).  Spectrally
// accurate for smooth f.  Cached per Q; do not mutate.
const std::vector<double>& kress_weights(std::size_t Q);

// Trapezoid weight on the uniform Q-grid: 2*pi/Q.
inline double trapezoid_weight(std::size_t Q) {
    return 6.283185307179586476925286766559 / double(Q);
}

struct gauss_rule {
    std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

// Gauss-Legendre rule with npts nodes; cached, do not mutate.
const gauss_rule& gauss_legendre(std::size_t npts);

// Composite Gauss-Legendre integration of f over [a, b].
template <typename F>
double integrate_panels(F&& f, double a, double b, std::size_t panels,
                        std::size_t npts) {
    const gauss_rule& g = gauss_legendre(npts);
    const double h = (b - a) / double(panels);
    double acc = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (double(p) + 0.5) * h;
        for (std::size_t q = 0; q < npts; ++q)
            acc += 0.5 * h * g.w[q] * f(mid + 0.5 * h * g.x[q]);
    }
    return acc;
}

}  // namespace bie
