#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bie/dataset_io.hpp"
#include "bie/nn.hpp"

namespace bie {

enum class lr_schedule_kind : std::uint32_t {
    // lr = lr0 * factor^floor(step / period); period defaults to
    // total_optimizer_steps / 100.
    inverse_time_staircase = 0,
    // lr is multiplied by factor when the best epoch loss has not improved
    // for more than `patience` epochs; patience defaults to epochs / 100.
    plateau_halve = 1,
};

struct train_config {
    std::size_t epochs = 1000;
    std::size_t batch_size = 8192;
    double lr0 = 1e-3;
    lr_schedule_kind schedule = lr_schedule_kind::plateau_halve;
    double factor = 0.5;
    std::size_t period = 0;    // staircase: steps per decay; 0 = total/100
    std::size_t patience = 0;  // plateau: epochs; 0 = epochs/100
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 1;
};

// Learning-rate bookkeeping for both schedules.  Staircase users call
// step_lr with the global 0-based optimizer step; plateau users feed each
// epoch loss to note_epoch_loss and read current().  Rates never increase.
class lr_controller {
  public:
    lr_controller(const train_config& cfg, std::size_t total_steps,
                  std::size_t total_epochs);

    double step_lr(std::size_t step) const;
    void note_epoch_loss(double loss);
    double current() const { return lr_; }

  private:
    lr_schedule_kind kind_;
    double lr0_, factor_, lr_;
    std::size_t period_ = 1, patience_ = 0;
    double best_ = 0.0;
    bool have_best_ = false;
    std::size_t age_ = 0;
};

struct epoch_stats {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double test_loss = 0.0;
    double lr = 0.0;  // rate used for this epoch's last optimizer step
};

struct train_result {
    std::vector<epoch_stats> history;
    std::vector<double> best_params;  // snapshot at the best test loss
    double best_test_loss = 0.0;
    std::size_t best_epoch = 0;
    std::size_t skipped_samples = 0;  // loss rows under the target-norm floor
};

// Batched inputs with one sample per row: Xa is the boundary side, Xb the
// right-hand side, Y the regression target.
struct model_tensors {
    mat Xa, Xb, Y;
};

// Coefficient-space tensors: Xa = [x coeffs | y coeffs], Xb = rhs
// coefficients, Y = density coefficients.
model_tensors coefficient_tensors(const dataset& ds);
// Point-sample tensors on the p-point uniform parameter grid (scalar
// families only): Xa = [x samples | y samples], Xb/Y sampled likewise.
model_tensors sampled_tensors(const dataset& ds, std::size_t p);

// Mini-batch Adam on the relative-l2 loss.  The model is (re)initialized
// from cfg.seed, so a rerun with identical inputs is bitwise reproducible.
// Per-epoch train/test losses are recorded, the parameter snapshot with the
// best test loss is kept and restored into the model on return.  Non-finite
// losses or gradients abort with a divergence error.
train_result train_model(operator_model& model, const model_tensors& train_set,
                         const model_tensors& test_set,
                         const train_config& cfg);

void write_training_log(const std::string& path,
                        const std::vector<epoch_stats>& history);

// Test-set metrics: MNE = mean ||pred - y||_2, MRE = mean of the per-sample
// relative errors (rows with ||y|| < 1e-12 are excluded from MRE), population
// variances of both, and wall-clock forward time per sample in milliseconds
// (one batched forward divided by the sample count).
struct eval_metrics {
    std::size_t count = 0;
    double mne = 0.0;
    double mre = 0.0;
    double var_mne = 0.0;
    double var_mre = 0.0;
    double mean_time_ms = 0.0;
};

eval_metrics evaluate_model(operator_model& model, const model_tensors& data);

std::string metrics_header();  // "MNE,MRE,variance-MNE,variance-MRE,Mean-Time/ms"
std::string metrics_row(const eval_metrics& m);

}  // namespace bie
