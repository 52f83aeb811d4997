#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bie/linalg.hpp"
#include "bie/rng.hpp"

namespace bie {

enum class model_type : std::uint32_t {
    feedforward = 0,
    tdonet = 1,
    deeponet = 2,
};

std::string model_type_name(model_type t);

// Dense network shape: widths = [in, hidden..., out], at least two entries.
// Hidden layers use tanh, the output layer is linear.
struct fnn_spec {
    std::vector<std::size_t> widths;
};

// out = scale * u_net([g, v_net([g, f]) .* sigma_net(g)]) where g and
// f are the boundary and right-hand-side coefficient vectors.  The latent
// width r is the shared output width of v_net and sigma_net; u_net takes
// [g, r] and emits the density coefficients.  scale multiplies the output and
// is fixed (not trained).
struct tdonet_spec {
    fnn_spec v_net;
    fnn_spec sigma_net;
    fnn_spec u_net;
    double output_scale = 1.0;
};

// out(t_j) = sum_q branch_gamma(g)_q * branch_f(f)_q * trunk(t_j)_q + bias.
// branch_gamma consumes the 2p boundary samples, branch_f the p right-hand
// side samples, and trunk maps a scalar parameter value to q latent weights;
// the bias is a single trainable scalar.  Outputs are produced on a fixed
// grid of p parameter values supplied at construction.
struct deeponet_spec {
    fnn_spec branch_gamma;
    fnn_spec branch_f;
    fnn_spec trunk;
};

// Offsets of one fully connected network inside a flat parameter vector.
// Layout per layer: weight matrix (out x in, row-major) then bias (out).
class fnn_block {
  public:
    fnn_block() = default;
    fnn_block(const fnn_spec& spec, std::size_t param_offset);

    std::size_t param_count() const { return count_; }
    std::size_t param_end() const { return offset_ + count_; }
    std::size_t in_width() const { return widths_.front(); }
    std::size_t out_width() const { return widths_.back(); }

    void init_params(double* base, rng& gen) const;

    // X has one sample per row.  Activations are cached for backward().
    mat forward(const double* base, const mat& X);
    // dY matches the last forward output; gradients accumulate into gbase.
    // Returns the gradient with respect to the input.
    mat backward(const double* base, const mat& dY, double* gbase);

  private:
    std::vector<std::size_t> widths_;
    std::size_t offset_ = 0;
    std::size_t count_ = 0;
    std::vector<mat> acts_;  // acts_[0] = input, acts_[l+1] = layer l output
};

// A trainable map (Xa, Xb) -> Y operating on batches (one sample per row).
// Parameters and gradients live in flat vectors so optimizers and
// checkpoints can treat every architecture uniformly.
class operator_model {
  public:
    virtual ~operator_model() = default;

    virtual model_type type() const = 0;
    virtual std::size_t input_a_width() const = 0;
    virtual std::size_t input_b_width() const = 0;  // 0 when unused
    virtual std::size_t output_width() const = 0;

    std::size_t param_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::vector<double>& grads() { return grads_; }
    void zero_grads();

    // Glorot-uniform weights, zero biases, block by block in layout order.
    virtual void init(std::uint64_t seed) = 0;

    virtual mat forward(const mat& Xa, const mat& Xb) = 0;
    // dY matches the last forward output; gradients accumulate.
    virtual void backward(const mat& dY) = 0;

  protected:
    std::vector<double> params_;
    std::vector<double> grads_;
};

std::unique_ptr<operator_model> make_feedforward(const fnn_spec& spec);
std::unique_ptr<operator_model> make_tdonet(const tdonet_spec& spec);
// p = number of parameter samples per function; the output grid is
// t_j = 2 pi j / p, matching uniform_grid(p).
std::unique_ptr<operator_model> make_deeponet(const deeponet_spec& spec,
                                              std::size_t p);

// Exposed for checkpoint reconstruction.
struct model_descriptor {
    model_type type = model_type::feedforward;
    fnn_spec net_a, net_b, net_c;  // feedforward uses net_a only
    double output_scale = 1.0;     // tdonet only
    std::size_t sample_points = 0; // deeponet only
};
model_descriptor describe(const operator_model& m);
std::unique_ptr<operator_model> make_model(const model_descriptor& d);

// Mean over the batch of per-sample relative l2 errors
// ||pred_i - target_i|| / ||target_i||.  Rows with ||target_i|| < 1e-12 are
// skipped and counted; a warning goes to stderr when any row is skipped.
struct loss_value {
    double value = 0.0;
    std::size_t counted = 0;
    std::size_t skipped = 0;
};
loss_value relative_l2_loss(const mat& pred, const mat& target);
// Same, and writes d loss / d pred (zero rows for skipped samples).
loss_value relative_l2_loss_grad(const mat& pred, const mat& target,
                                 mat& dpred);

}  // namespace bie
