#include "bie/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "bie/errors.hpp"
#include "bie/trig.hpp"

namespace bie {

namespace {

std::vector<double> stack2(const std::vector<double>& a,
                           const std::vector<double>& b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

double rel_l2(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

// Fill records [b * per, (b+1) * per) for one boundary; returns the worst
// round-trip residual over those records.
double generate_for_boundary(const datagen_config& cfg, std::size_t b,
                             const boundary& bnd, dataset& ds) {
    rng gen_d(mix_seed(cfg.seed, b));
    double worst = 0.0;

    const std::size_t Q = cfg.quad ? cfg.quad : default_grid(cfg.n_f);
    std::vector<double> gamma = stack2(bnd.x, bnd.y);

    problem p;
    p.kind = cfg.kind;
    p.bnd = bnd;

    const auto rec = [&](std::size_t j) -> dataset_record& {
        return ds.records[b * cfg.per_boundary + j];
    };

    switch (cfg.kind) {
        case bvp_kind::interior_dirichlet:
        case bvp_kind::interior_neumann:
        case bvp_kind::exterior_dirichlet:
        case bvp_kind::exterior_neumann: {
            const galerkin_system sys = assemble_galerkin(p, cfg.n_f, Q);
            for (std::size_t j = 0; j < cfg.per_boundary; ++j) {
                coeff_vec phi = sample_density(gen_d, cfg.n_f, cfg.density_decay);
                if (cfg.kind == bvp_kind::interior_neumann)
                    phi = canonicalize_neumann_density(sys, phi);
                dataset_record& r = rec(j);
                r.gamma = gamma;
                r.density = phi;
                r.rhs = matvec(sys.A, phi);
                worst = std::max(worst, rel_l2(solve_galerkin(sys, r.rhs), phi));
            }
            break;
        }
        case bvp_kind::potential_flow: {
            p.flow_speed = 1.0;
            const galerkin_system sys = assemble_galerkin(p, cfg.n_f, Q);
            const std::vector<double> rhs1 = rhs_potential_flow(p, cfg.n_f, Q);
            const std::vector<double> phi1 = solve_galerkin(sys, rhs1);
            worst = std::max(worst, rel_l2(matvec(sys.A, phi1), rhs1));
            for (std::size_t j = 0; j < cfg.per_boundary; ++j) {
                const double v0 = gen_d.uniform(cfg.v0_min, cfg.v0_max);
                dataset_record& r = rec(j);
                r.meta[0] = v0;
                r.gamma = gamma;
                r.rhs = rhs1;
                r.density = phi1;
                for (auto& v : r.rhs) v *= v0;
                for (auto& v : r.density) v *= v0;
            }
            break;
        }
        case bvp_kind::elastostatic: {
            const galerkin_system sys = assemble_galerkin(p, cfg.n_f, Q);
            // The right-hand side is linear in (a1, b1, a2, b2); precompute
            // the four unit responses.
            std::vector<std::vector<double>> unit_rhs(4);
            std::vector<std::array<coeff_vec, 2>> unit_v(4);
            for (std::size_t u = 0; u < 4; ++u) {
                const double a1 = (u == 0), b1 = (u == 1), a2 = (u == 2),
                             b2 = (u == 3);
                coeff_vec v1(coeff_len(bnd.order()), 0.0), v2 = v1;
                for (std::size_t i = 0; i < v1.size(); ++i) {
                    v1[i] = a1 * bnd.x[i] + b1 * bnd.y[i];
                    v2[i] = a2 * bnd.x[i] + b2 * bnd.y[i];
                }
                unit_v[u] = {trig_resize(v1, cfg.n_f), trig_resize(v2, cfg.n_f)};
                unit_rhs[u] = rhs_elastostatic(p, v1, v2, cfg.n_f, Q);
            }
            for (std::size_t j = 0; j < cfg.per_boundary; ++j) {
                double c[4];
                for (double& v : c) v = gen_d.normal(0.0, cfg.strain_scale);
                dataset_record& r = rec(j);
                for (std::size_t u = 0; u < 4; ++u) r.meta[u] = c[u];
                r.gamma = gamma;
                std::vector<double> g(unit_rhs[0].size(), 0.0);
                coeff_vec v1(coeff_len(cfg.n_f), 0.0), v2 = v1;
                for (std::size_t u = 0; u < 4; ++u)
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        g[i] += c[u] * unit_rhs[u][i];
                        if (i < v1.size()) {
                            v1[i] += c[u] * unit_v[u][0][i];
                            v2[i] += c[u] * unit_v[u][1][i];
                        }
                    }
                r.rhs = stack2(v1, v2);
                r.density = solve_galerkin(sys, g);
                worst = std::max(worst, rel_l2(matvec(sys.A, r.density), g));
            }
            break;
        }
        case bvp_kind::helmholtz: {
            for (std::size_t j = 0; j < cfg.per_boundary; ++j) {
                const double k = gen_d.uniform(cfg.k_min, cfg.k_max);
                p.wavenumber = k;
                p.coupling = 0.0;  // eta = k
                const galerkin_system sys = assemble_galerkin(p, cfg.n_f, Q);
                const std::vector<cplx> rhs = rhs_helmholtz(p, cfg.n_f, Q);
                const std::vector<cplx> phi = solve_galerkin(sys, rhs);
                std::vector<cplx> res = matvec(sys.Ac, phi);
                for (std::size_t i = 0; i < res.size(); ++i) res[i] -= rhs[i];
                worst = std::max(worst,
                                 norm2(res) / std::max(norm2(rhs), 1e-300));
                dataset_record& r = rec(j);
                r.meta = {k, p.eta(), p.direction.x, p.direction.y};
                r.gamma = gamma;
                r.rhs.resize(2 * rhs.size());
                r.density.resize(2 * phi.size());
                for (std::size_t i = 0; i < rhs.size(); ++i) {
                    r.rhs[i] = rhs[i].real();
                    r.rhs[rhs.size() + i] = rhs[i].imag();
                    r.density[i] = phi[i].real();
                    r.density[phi.size() + i] = phi[i].imag();
                }
            }
            break;
        }
    }
    return worst;
}

}  // namespace

std::size_t datagen_threads() {
    const char* env = std::getenv("BIE_THREADS");
    if (!env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    return v >= 1 ? std::size_t(v) : 1;
}

dataset generate_dataset(const datagen_config& cfg,
                         const std::vector<boundary>& boundaries,
                         datagen_stats* stats) {
    const std::size_t n_boundaries = boundaries.size();
    require(n_boundaries >= 1 && cfg.per_boundary >= 1, errc::invalid_argument,
            "generate_dataset: empty plan");
    const std::size_t n_b = boundaries.front().order();
    for (const boundary& b : boundaries)
        require(b.order() == n_b, errc::invalid_argument,
                "generate_dataset: boundaries must share one order");
    require(n_b >= 1 && cfg.n_f >= 1, errc::invalid_argument,
            "generate_dataset: need n_f >= 1 and boundary order >= 1");
    dataset ds;
    ds.kind = cfg.kind;
    ds.n_b = std::uint32_t(n_b);
    ds.n_f = std::uint32_t(cfg.n_f);
    ds.components =
        (cfg.kind == bvp_kind::elastostatic || cfg.kind == bvp_kind::helmholtz)
            ? 2
            : 1;
    ds.records.resize(n_boundaries * cfg.per_boundary);

    std::vector<double> residual(n_boundaries, 0.0);
    const std::size_t nthreads = std::min(datagen_threads(), n_boundaries);
    if (nthreads <= 1) {
        for (std::size_t b = 0; b < n_boundaries; ++b)
            residual[b] = generate_for_boundary(cfg, b, boundaries[b], ds);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(nthreads);
        for (std::size_t tid = 0; tid < nthreads; ++tid)
            pool.emplace_back([&, tid] {
                try {
                    for (std::size_t b = tid; b < n_boundaries; b += nthreads)
                        residual[b] =
                            generate_for_boundary(cfg, b, boundaries[b], ds);
                } catch (...) {
                    errors[tid] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    if (stats)
        stats->max_residual =
            *std::max_element(residual.begin(), residual.end());
    return ds;
}

boundary_set generate_boundaries(std::size_t count, const sampler_params& sp,
                                 std::uint64_t seed, sampler_stats* stats) {
    boundary_set bs;
    bs.n = std::uint32_t(sp.n);
    bs.items.reserve(count);
    sampler_stats local;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t s = mix_seed(seed, i);
        rng gen(s);
        bs.items.push_back(sample_boundary(gen, sp, &local));
        require(local.attempts < 100000 ||
                    double(local.accepted) >= 0.01 * double(local.attempts),
                errc::divergence,
                "boundary sampler: acceptance rate below 1% over 100000 "
                "attempts");
        bs.rho.push_back(sp.rho);
        bs.seed.push_back(s);
    }
    if (stats) {
        stats->attempts += local.attempts;
        stats->accepted += local.accepted;
    }
    return bs;
}

void split_dataset(const dataset& ds, double train_frac, std::uint64_t seed,
                   dataset& train, dataset& test) {
    require(train_frac > 0.0 && train_frac < 1.0, errc::invalid_argument,
            "split_dataset: fraction must lie in (0, 1)");
    std::vector<std::size_t> idx(ds.records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng gen(seed);
    gen.shuffle(idx);
    const std::size_t ntrain =
        std::size_t(std::llround(train_frac * double(idx.size())));
    require(ntrain >= 1 && ntrain < idx.size(), errc::invalid_argument,
            "split_dataset: split leaves an empty part");
    train.kind = test.kind = ds.kind;
    train.n_b = test.n_b = ds.n_b;
    train.n_f = test.n_f = ds.n_f;
    train.components = test.components = ds.components;
    train.records.clear();
    test.records.clear();
    for (std::size_t i = 0; i < idx.size(); ++i)
        (i < ntrain ? train : test).records.push_back(ds.records[idx[i]]);
}

}  // namespace bie
