#pragma once

#include <cstdint>

#include "bie/dataset_io.hpp"

namespace bie {

// Generation recipe for one family.  Record r = b * per_boundary + j uses
// boundary b of the supplied set; density/parameter draws use seed
// mix_seed(cfg.seed, b), so the output is identical for any thread count
// (set BIE_THREADS to parallelize across boundaries).
//
// Per-family record layout:
//   interior/exterior Dirichlet/Neumann: density phi sampled, rhs = (I - M) phi;
//     interior Neumann densities are first canonicalized against the system
//     nullspace so re-solving reproduces them exactly.  meta unused.
//   potential_flow: meta0 = v0 ~ U(v0_min, v0_max), rhs = projection of
//     2 v0 n1(t), density = solved.
//   elastostatic: meta = (a1, b1, a2, b2) of the linear displacement
//     v = (a1 x1 + b1 x2, a2 x1 + b2 x2); rhs = displacement coefficients,
//     density = solved traction coefficients; components stacked [c1 | c2].
//   helmholtz: meta = (k, eta, d1, d2), k ~ U(k_min, k_max); rhs = coefficients
//     of -2 exp(i k d.gamma), density solved; [real | imaginary] stacked.
struct datagen_config {
    bvp_kind kind = bvp_kind::interior_dirichlet;
    std::size_t per_boundary = 20;
    std::size_t n_f = 20;
    double density_decay = 5.0;  // coefficient variance k^-m
    std::size_t quad = 0;        // quadrature size; 0 = default_grid(n_f)
    std::uint64_t seed = 1;
    double v0_min = 0.5, v0_max = 3.0;
    double k_min = 40.0, k_max = 50.0;
    double strain_scale = 1.0;
};

// max_residual is the worst round-trip figure over all records: for families
// with sampled densities it is the relative error of re-solving the stored
// right-hand side, for solved families the normalized linear-system residual.
struct datagen_stats {
    double max_residual = 0.0;
};

dataset generate_dataset(const datagen_config& cfg,
                         const std::vector<boundary>& boundaries,
                         datagen_stats* stats = nullptr);

// Filtered boundary draws with their per-item seeds recorded.  stats, when
// given, accumulates raw attempt/acceptance counts across all items.
boundary_set generate_boundaries(std::size_t count, const sampler_params& sp,
                                 std::uint64_t seed,
                                 sampler_stats* stats = nullptr);

// Deterministic shuffle split (train gets round(frac * count) records).
void split_dataset(const dataset& ds, double train_frac, std::uint64_t seed,
                   dataset& train, dataset& test);

// Thread count from BIE_THREADS (>= 1; unset or invalid means 1).
std::size_t datagen_threads();

}  // namespace bie
