#include "bie/bessel.hpp"

#include <cmath>

#include "bie/errors.hpp"

namespace bie {

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;
constexpr double euler_gamma = 0.57721566490153286060651209008240243;
constexpr double seam = 12.0;  // series below, asymptotics above

// Power-series values for order 0.
double j0_series(double z) {
    const double x = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m <= 80; ++m) {
        term *= -x / (double(m) * double(m));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double j1_series(double z) {
    const double x = 0.25 * z * z;
    double term = 1.0, sum = 1.0;  // sum of (-x)^m / (m! (m+1)!)
    for (int m = 1; m <= 80; ++m) {
        term *= -x / (double(m) * double(m + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return 0.5 * z * sum;
}

double y0_series(double z) {
    const double x = 0.25 * z * z;
    double term = 1.0, hm = 0.0, sum = 0.0;  // sum of (-1)^m H_m x^m / (m!)^2
    for (int m = 1; m <= 80; ++m) {
        term *= -x / (double(m) * double(m));
        hm += 1.0 / double(m);
        sum += term * hm;
        if (std::abs(term) < 1e-18) break;
    }
    return (2.0 / pi) * ((std::log(0.5 * z) + euler_gamma) * j0_series(z) - sum);
}

double y1_series(double z) {
    const double x = 0.25 * z * z;
    // sum of (-1)^m (H_m + H_{m+1}) x^m / (m! (m+1)!), H_0 = 0
    double term = 1.0, hm = 0.0, hm1 = 1.0, sum = hm + hm1;
    for (int m = 1; m <= 80; ++m) {
        term *= -x / (double(m) * double(m + 1));
        hm += 1.0 / double(m);
        hm1 += 1.0 / double(m + 1);
        sum += term * (hm + hm1);
        if (std::abs(term) < 1e-18) break;
    }
    return (2.0 / pi) * (std::log(0.5 * z) + euler_gamma) * j1_series(z) -
           2.0 / (pi * z) - (z / (2.0 * pi)) * sum;
}

// Hankel asymptotic amplitude/phase sums with optimal truncation.
void asymptotic_pq(int nu, double z, double& P, double& Q) {
    const double mu = 4.0 * double(nu) * double(nu);
    double term = 1.0;  // t_k, starting at t_0 = 1
    P = 1.0;
    Q = 0.0;
    double prev = 1e300;
    for (int k = 0; k < 40; ++k) {
        const double odd = 2.0 * double(k) + 1.0;
        term *= (mu - odd * odd) / (8.0 * double(k + 1) * z);
        if (std::abs(term) >= prev) break;  // divergent tail reached
        prev = std::abs(term);
        const int j = k + 1;  // index of the term just built
        const double signed_term = ((j / 2) % 2 == 0 ? term : -term);
        if (j % 2 == 0)
            P += signed_term;
        else
            Q += signed_term;
    }
}

void asymptotic_jy(int nu, double z, double& J, double& Y) {
    double P, Q;
    asymptotic_pq(nu, z, P, Q);
    const double omega = z - (0.5 * double(nu) + 0.25) * pi;
    const double amp = std::sqrt(2.0 / (pi * z));
    const double c = std::cos(omega), s = std::sin(omega);
    J = amp * (P * c - Q * s);
    Y = amp * (P * s + Q * c);
}

}  // namespace

double bessel_j0(double z) {
    require(z >= 0.0, errc::invalid_argument, "bessel_j0: argument must be >= 0");
    if (z < seam) return j0_series(z);
    double J, Y;
    asymptotic_jy(0, z, J, Y);
    return J;
}

double bessel_j1(double z) {
    require(z >= 0.0, errc::invalid_argument, "bessel_j1: argument must be >= 0");
    if (z < seam) return j1_series(z);
    double J, Y;
    asymptotic_jy(1, z, J, Y);
    return J;
}

double bessel_y0(double z) {
    require(z > 0.0, errc::invalid_argument, "bessel_y0: argument must be > 0");
    if (z < seam) return y0_series(z);
    double J, Y;
    asymptotic_jy(0, z, J, Y);
    return Y;
}

double bessel_y1(double z) {
    require(z > 0.0, errc::invalid_argument, "bessel_y1: argument must be > 0");
    if (z < seam) return y1_series(z);
    double J, Y;
    asymptotic_jy(1, z, J, Y);
    return Y;
}

std::complex<double> hankel1_0(double z) {
    require(z > 0.0, errc::invalid_argument, "hankel1_0: argument must be > 0");
    if (z < seam) return {j0_series(z), y0_series(z)};
    double J, Y;
    asymptotic_jy(0, z, J, Y);
    return {J, Y};
}

std::complex<double> hankel1_1(double z) {
    require(z > 0.0, errc::invalid_argument, "hankel1_1: argument must be > 0");
    if (z < seam) return {j1_series(z), y1_series(z)};
    double J, Y;
    asymptotic_jy(1, z, J, Y);
    return {J, Y};
}

std::vector<double> bessel_jn(std::size_t nmax, double z) {
    require(z >= 0.0, errc::invalid_argument, "bessel_jn: argument must be >= 0");
    std::vector<double> out(nmax + 1, 0.0);
    if (z == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const std::size_t start = nmax + 20 + std::size_t(1.2 * z);
    double fp = 0.0, fc = 1e-300, norm_sum = 0.0;
    for (std::size_t k = start; k-- > 0;) {
        const double fm = (2.0 * double(k + 1) / z) * fc - fp;
        fp = fc;
        fc = fm;
        if (k <= nmax) out[k] = fc;
        if (k % 2 == 0) norm_sum += (k == 0 ? fc : 2.0 * fc);
        // rescale to dodge overflow on long recurrences
        if (std::abs(fc) > 1e250) {
            fp *= 1e-250;
            fc *= 1e-250;
            norm_sum *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
    }
    for (auto& v : out) v /= norm_sum;
    return out;
}

std::vector<double> bessel_yn(std::size_t nmax, double z) {
    require(z > 0.0, errc::invalid_argument, "bessel_yn: argument must be > 0");
    std::vector<double> out(nmax + 1, 0.0);
    out[0] = bessel_y0(z);
    if (nmax >= 1) out[1] = bessel_y1(z);
    for (std::size_t k = 2; k <= nmax; ++k)
        out[k] = (2.0 * double(k - 1) / z) * out[k - 1] - out[k - 2];
    return out;
}

}  // namespace bie
