#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bie {

// Bessel functions of the first and second kind, orders 0 and 1, double
// precision across z in (0, 200]: power series below z = 12, Hankel
// asymptotic expansion with optimal truncation above.
double bessel_j0(double z);   // z >= 0
double bessel_j1(double z);   // z >= 0
double bessel_y0(double z);   // z > 0
double bessel_y1(double z);   // z > 0

// H^(1)_0 and H^(1)_1.
std::complex<double> hankel1_0(double z);
std::complex<double> hankel1_1(double z);

// J_0..J_nmax via Miller's downward recurrence (normalized by the even-order
// sum rule); Y_0..Y_nmax via upward recurrence.
std::vector<double> bessel_jn(std::size_t nmax, double z);
std::vector<double> bessel_yn(std::size_t nmax, double z);

}  // namespace bie
