#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "bie/nn.hpp"

namespace bie {

// Provenance recorded next to the parameters.
struct checkpoint_meta {
    std::uint64_t epochs = 0;
    std::uint64_t best_epoch = 0;
    double best_test_loss = 0.0;
    double final_lr = 0.0;
    std::uint64_t seed = 0;
};

// Binary "BIOP" v1: architecture descriptor, flat f64 parameters, training
// metadata.  Little-endian throughout; write then read round-trips bitwise.
void save_checkpoint(const std::string& path, const operator_model& model,
                     const checkpoint_meta& meta);

std::unique_ptr<operator_model> load_checkpoint(const std::string& path,
                                                checkpoint_meta* meta = nullptr);

}  // namespace bie
