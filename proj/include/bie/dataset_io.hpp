#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bie/assembly.hpp"
#include "bie/boundary.hpp"

namespace bie {

// One training example: boundary coefficients, right-hand side coefficients
// and density coefficients, plus four metadata slots whose meaning depends on
// the family (see datagen).
struct dataset_record {
    std::array<double, 4> meta{};
    std::vector<double> gamma;    // [x coeffs | y coeffs], 2(2 n_b + 1)
    std::vector<double> rhs;      // components * (2 n_f + 1)
    std::vector<double> density;  // components * (2 n_f + 1)
};

struct dataset {
    bvp_kind kind = bvp_kind::interior_dirichlet;
    std::uint32_t n_b = 0;        // boundary trig order
    std::uint32_t n_f = 0;        // rhs/density trig order
    std::uint32_t components = 1; // 1 scalar, 2 elastostatic or re/im pairs
    std::vector<dataset_record> records;

    std::size_t gamma_len() const { return 2 * (2 * std::size_t(n_b) + 1); }
    std::size_t field_len() const {
        return components * (2 * std::size_t(n_f) + 1);
    }
};

// Binary container (magic "BIED", version 1, little-endian f64 payload).
void write_dataset(const std::string& path, const dataset& ds);
dataset read_dataset(const std::string& path);

// One row per record, %.17g columns, with a header line.
void write_dataset_csv(const std::string& path, const dataset& ds);

// Sampled boundaries with their draw parameters (magic "BIEB", version 1).
struct boundary_set {
    std::uint32_t n = 0;
    std::vector<boundary> items;
    std::vector<double> rho;
    std::vector<std::uint64_t> seed;
};

void write_boundaries(const std::string& path, const boundary_set& bs);
boundary_set read_boundaries(const std::string& path);
void write_boundaries_csv(const std::string& path, const boundary_set& bs);

// Whole-file byte equality (used by the round-trip identity checks).
bool files_identical(const std::string& a, const std::string& b);

}  // namespace bie
