#include "bie/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "bie/errors.hpp"

namespace bie {

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;

std::mutex cache_mutex;
std::map<std::size_t, std::unique_ptr<std::vector<double>>> kress_cache;
std::map<std::size_t, std::unique_ptr<gauss_rule>> gauss_cache;

std::unique_ptr<std::vector<double>> make_kress(std::size_t Q) {
    const std::size_t nq = Q / 2;
    auto R = std::make_unique<std::vector<double>>(Q, 0.0);
    for (std::size_t d = 0; d < Q; ++d) {
        const double theta = 2.0 * pi * double(d) / double(Q);
        double sum = 0.0;
        for (std::size_t m = 1; m < nq; ++m)
            sum += std::cos(double(m) * theta) / double(m);
        (*R)[d] = -(2.0 * pi / double(nq)) * sum -
                  (pi / (double(nq) * double(nq))) * std::cos(double(nq) * theta);
    }
    return R;
}

std::unique_ptr<gauss_rule> make_gauss(std::size_t n) {
    auto rule = std::make_unique<gauss_rule>();
    rule->x.resize(n);
    rule->w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(pi * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 =
                    ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) /
                    double(k);
                p0 = p1;
                p1 = p2;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule->x[i] = x;
        rule->w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const std::vector<double>& kress_weights(std::size_t Q) {
    require(Q >= 4 && Q % 2 == 0, errc::invalid_argument,
            "kress_weights: grid size must be even and at least 4");
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& slot = kress_cache[Q];
    if (!slot) slot = make_kress(Q);
    return *slot;
}

const gauss_rule& gauss_legendre(std::size_t npts) {
    require(npts >= 1 && npts <= 64, errc::invalid_argument,
            "gauss_legendre: unsupported node count");
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& slot = gauss_cache[npts];
    if (!slot) slot = make_gauss(npts);
    return *slot;
}

}  // namespace bie
