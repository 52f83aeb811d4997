#include "bie/nn.hpp"

#include <cmath>
#include <cstdio>

#include "bie/errors.hpp"
#include "bie/rng.hpp"
#include "bie/simd.hpp"
#include "bie/trig.hpp"

namespace bie {

namespace {

mat hcat(const mat& A, const mat& B) {
    require(A.rows == B.rows, errc::invalid_argument,
            "hcat: row counts differ");
    mat C(A.rows, A.cols + B.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        double* dst = C.row(i);
        const double* a = A.row(i);
        const double* b = B.row(i);
        for (std::size_t j = 0; j < A.cols; ++j) dst[j] = a[j];
        for (std::size_t j = 0; j < B.cols; ++j) dst[A.cols + j] = b[j];
    }
    return C;
}

mat take_cols(const mat& X, std::size_t first, std::size_t count) {
    mat Y(X.rows, count);
    for (std::size_t i = 0; i < X.rows; ++i)
        for (std::size_t j = 0; j < count; ++j) Y(i, j) = X(i, first + j);
    return Y;
}

void hadamard_into(const mat& A, const mat& B, mat& C) {
    C.rows = A.rows;
    C.cols = A.cols;
    C.a.resize(A.a.size());
    simd::hadamard(A.a.data(), B.a.data(), C.a.data(), A.a.size());
}

}  // namespace

fnn_block::fnn_block(const fnn_spec& spec, std::size_t param_offset)
    : widths_(spec.widths), offset_(param_offset) {
    require(widths_.size() >= 2, errc::invalid_argument,
            "network needs at least an input and an output layer");
    for (std::size_t w : widths_)
        require(w >= 1, errc::invalid_argument, "layer widths must be >= 1");
    count_ = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l)
        count_ += widths_[l + 1] * widths_[l] + widths_[l + 1];
}

void fnn_block::init_params(double* base, rng& gen) const {
    double* p = base + offset_;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        const std::size_t in = widths_[l], out = widths_[l + 1];
        const double limit = std::sqrt(6.0 / double(in + out));
        for (std::size_t i = 0; i < out * in; ++i)
            *p++ = gen.uniform(-limit, limit);
        for (std::size_t i = 0; i < out; ++i) *p++ = 0.0;
    }
}

mat fnn_block::forward(const double* base, const mat& X) {
    require(X.cols == widths_.front(), errc::invalid_argument,
            "network input width mismatch");
    const std::size_t nlayers = widths_.size() - 1;
    acts_.resize(nlayers + 1);
    acts_[0] = X;
    std::size_t p = offset_;
    for (std::size_t l = 0; l < nlayers; ++l) {
        const std::size_t in = widths_[l], out = widths_[l + 1];
        const double* W = base + p;
        const double* b = base + p + out * in;
        p += out * in + out;

        const mat& A = acts_[l];
        mat Z(A.rows, out);
        for (std::size_t i = 0; i < Z.rows; ++i) {
            double* zi = Z.row(i);
            for (std::size_t j = 0; j < out; ++j) zi[j] = b[j];
        }
        simd::kernels().gemm_nt(A.rows, out, in, A.a.data(), in, W, in,
                                Z.a.data(), out);
        if (l + 1 < nlayers)
            for (double& z : Z.a) z = std::tanh(z);
        acts_[l + 1] = std::move(Z);
    }
    return acts_.back();
}

mat fnn_block::backward(const double* base, const mat& dY, double* gbase) {
    const std::size_t nlayers = widths_.size() - 1;
    require(acts_.size() == nlayers + 1, errc::invalid_argument,
            "backward without a preceding forward");
    require(dY.rows == acts_.back().rows && dY.cols == widths_.back(),
            errc::invalid_argument, "output gradient shape mismatch");

    // Per-layer parameter offsets (walked backwards below).
    std::vector<std::size_t> offs(nlayers);
    std::size_t p = offset_;
    for (std::size_t l = 0; l < nlayers; ++l) {
        offs[l] = p;
        p += widths_[l + 1] * widths_[l] + widths_[l + 1];
    }

    mat dZ = dY;
    for (std::size_t l = nlayers; l-- > 0;) {
        const std::size_t in = widths_[l], out = widths_[l + 1];
        const double* W = base + offs[l];
        double* gW = gbase + offs[l];
        double* gb = gW + out * in;
        const mat& A = acts_[l];
        const std::size_t batch = A.rows;

        simd::kernels().gemm_tn(out, in, batch, dZ.a.data(), out, A.a.data(),
                                in, gW, in);
        for (std::size_t i = 0; i < batch; ++i)
            simd::axpy(1.0, dZ.row(i), gb, out);

        mat dA(batch, in);
        simd::kernels().gemm_nn(batch, in, out, dZ.a.data(), out, W, in,
                                dA.a.data(), in);
        if (l == 0) return dA;
        // A = tanh(pre-activation), so the chain factor is 1 - A^2.
        for (std::size_t i = 0; i < dA.a.size(); ++i)
            dA.a[i] *= 1.0 - acts_[l].a[i] * acts_[l].a[i];
        dZ = std::move(dA);
    }
    return {};
}

void operator_model::zero_grads() {
    std::fill(grads_.begin(), grads_.end(), 0.0);
}

namespace {

class feedforward_model final : public operator_model {
  public:
    explicit feedforward_model(const fnn_spec& spec)
        : spec_(spec), net_(spec, 0) {
        params_.assign(net_.param_count(), 0.0);
        grads_.assign(params_.size(), 0.0);
    }

    model_type type() const override { return model_type::feedforward; }
    std::size_t input_a_width() const override { return net_.in_width(); }
    std::size_t input_b_width() const override { return 0; }
    std::size_t output_width() const override { return net_.out_width(); }

    void init(std::uint64_t seed) override {
        rng gen(seed);
        net_.init_params(params_.data(), gen);
    }

    mat forward(const mat& Xa, const mat& Xb) override {
        if (Xb.cols == 0) return net_.forward(params_.data(), Xa);
        return net_.forward(params_.data(), hcat(Xa, Xb));
    }

    void backward(const mat& dY) override {
        net_.backward(params_.data(), dY, grads_.data());
    }

    fnn_spec spec_;

  private:
    fnn_block net_;
};

class tdonet_model final : public operator_model {
  public:
    explicit tdonet_model(const tdonet_spec& spec)
        : spec_(spec),
          v_(spec.v_net, 0),
          s_(spec.sigma_net, v_.param_end()),
          u_(spec.u_net, s_.param_end()) {
        wa_ = s_.in_width();
        require(v_.in_width() > wa_, errc::invalid_argument,
                "v_net must consume the boundary and the right-hand side");
        wb_ = v_.in_width() - wa_;
        require(v_.out_width() == s_.out_width(), errc::invalid_argument,
                "v_net and sigma_net output widths must match");
        require(u_.in_width() == wa_ + v_.out_width(), errc::invalid_argument,
                "u_net input width must equal boundary width + latent width");
        require(std::isfinite(spec.output_scale) && spec.output_scale != 0.0,
                errc::invalid_argument, "output scale must be finite nonzero");
        params_.assign(u_.param_end(), 0.0);
        grads_.assign(params_.size(), 0.0);
    }

    model_type type() const override { return model_type::tdonet; }
    std::size_t input_a_width() const override { return wa_; }
    std::size_t input_b_width() const override { return wb_; }
    std::size_t output_width() const override { return u_.out_width(); }

    void init(std::uint64_t seed) override {
        rng gen(seed);
        v_.init_params(params_.data(), gen);
        s_.init_params(params_.data(), gen);
        u_.init_params(params_.data(), gen);
    }

    mat forward(const mat& Xa, const mat& Xb) override {
        require(Xa.cols == wa_ && Xb.cols == wb_ && Xa.rows == Xb.rows,
                errc::invalid_argument, "tdonet input shape mismatch");
        vout_ = v_.forward(params_.data(), hcat(Xa, Xb));
        sout_ = s_.forward(params_.data(), Xa);
        mat h;
        hadamard_into(vout_, sout_, h);
        mat out = u_.forward(params_.data(), hcat(Xa, h));
        simd::scale(spec_.output_scale, out.a.data(), out.a.size());
        return out;
    }

    void backward(const mat& dY) override {
        mat dOut = dY;
        simd::scale(spec_.output_scale, dOut.a.data(), dOut.a.size());
        const mat dXu = u_.backward(params_.data(), dOut, grads_.data());
        const std::size_t r = v_.out_width();
        const mat dh = take_cols(dXu, wa_, r);
        mat dv, ds;
        hadamard_into(dh, sout_, dv);
        hadamard_into(dh, vout_, ds);
        v_.backward(params_.data(), dv, grads_.data());
        s_.backward(params_.data(), ds, grads_.data());
    }

    tdonet_spec spec_;

  private:
    fnn_block v_, s_, u_;
    std::size_t wa_ = 0, wb_ = 0;
    mat vout_, sout_;
};

class deeponet_model final : public operator_model {
  public:
    deeponet_model(const deeponet_spec& spec, std::size_t p)
        : spec_(spec),
          p_(p),
          bg_(spec.branch_gamma, 0),
          bf_(spec.branch_f, bg_.param_end()),
          tr_(spec.trunk, bf_.param_end()) {
        require(p_ >= 1, errc::invalid_argument, "need at least one sample point");
        require(bg_.in_width() == 2 * p_, errc::invalid_argument,
                "boundary branch input width must be 2p");
        require(bf_.in_width() == p_, errc::invalid_argument,
                "right-hand-side branch input width must be p");
        require(tr_.in_width() == 1, errc::invalid_argument,
                "trunk input is the scalar parameter value");
        require(bg_.out_width() == bf_.out_width() &&
                    bg_.out_width() == tr_.out_width(),
                errc::invalid_argument,
                "branch and trunk latent widths must match");
        bias_off_ = tr_.param_end();
        params_.assign(bias_off_ + 1, 0.0);
        grads_.assign(params_.size(), 0.0);
        tgrid_ = mat(p_, 1);
        const std::vector<double> t = uniform_grid(p_);
        for (std::size_t j = 0; j < p_; ++j) tgrid_(j, 0) = t[j];
    }

    model_type type() const override { return model_type::deeponet; }
    std::size_t input_a_width() const override { return 2 * p_; }
    std::size_t input_b_width() const override { return p_; }
    std::size_t output_width() const override { return p_; }
    std::size_t sample_points() const { return p_; }

    void init(std::uint64_t seed) override {
        rng gen(seed);
        bg_.init_params(params_.data(), gen);
        bf_.init_params(params_.data(), gen);
        tr_.init_params(params_.data(), gen);
        params_[bias_off_] = 0.0;
    }

    mat forward(const mat& Xa, const mat& Xb) override {
        require(Xa.cols == 2 * p_ && Xb.cols == p_ && Xa.rows == Xb.rows,
                errc::invalid_argument, "deeponet input shape mismatch");
        Bg_ = bg_.forward(params_.data(), Xa);
        Bf_ = bf_.forward(params_.data(), Xb);
        mat H;
        hadamard_into(Bg_, Bf_, H);
        T_ = tr_.forward(params_.data(), tgrid_);
        mat out(Xa.rows, p_);
        const double b0 = params_[bias_off_];
        for (double& v : out.a) v = b0;
        simd::kernels().gemm_nt(out.rows, p_, T_.cols, H.a.data(), H.cols,
                                T_.a.data(), T_.cols, out.a.data(), p_);
        return out;
    }

    void backward(const mat& dY) override {
        const std::size_t q = T_.cols, batch = dY.rows;
        grads_[bias_off_] += simd::sum(dY.a.data(), dY.a.size());
        mat dH(batch, q);
        simd::kernels().gemm_nn(batch, q, p_, dY.a.data(), p_, T_.a.data(), q,
                                dH.a.data(), q);
        mat H;
        hadamard_into(Bg_, Bf_, H);
        mat dT(p_, q);
        simd::kernels().gemm_tn(p_, q, batch, dY.a.data(), p_, H.a.data(), q,
                                dT.a.data(), q);
        mat dBg, dBf;
        hadamard_into(dH, Bf_, dBg);
        hadamard_into(dH, Bg_, dBf);
        bg_.backward(params_.data(), dBg, grads_.data());
        bf_.backward(params_.data(), dBf, grads_.data());
        tr_.backward(params_.data(), dT, grads_.data());
    }

    deeponet_spec spec_;

  private:
    std::size_t p_ = 0;
    fnn_block bg_, bf_, tr_;
    std::size_t bias_off_ = 0;
    mat tgrid_, Bg_, Bf_, T_;
};

}  // namespace

std::string model_type_name(model_type t) {
    switch (t) {
        case model_type::feedforward: return "feedforward";
        case model_type::tdonet: return "tdonet";
        case model_type::deeponet: return "deeponet";
    }
    fail(errc::invalid_argument, "unknown model type");
}

std::unique_ptr<operator_model> make_feedforward(const fnn_spec& spec) {
    return std::make_unique<feedforward_model>(spec);
}

std::unique_ptr<operator_model> make_tdonet(const tdonet_spec& spec) {
    return std::make_unique<tdonet_model>(spec);
}

std::unique_ptr<operator_model> make_deeponet(const deeponet_spec& spec,
                                              std::size_t p) {
    return std::make_unique<deeponet_model>(spec, p);
}

model_descriptor describe(const operator_model& m) {
    model_descriptor d;
    d.type = m.type();
    switch (m.type()) {
        case model_type::feedforward:
            d.net_a = static_cast<const feedforward_model&>(m).spec_;
            break;
        case model_type::tdonet: {
            const auto& t = static_cast<const tdonet_model&>(m).spec_;
            d.net_a = t.v_net;
            d.net_b = t.sigma_net;
            d.net_c = t.u_net;
            d.output_scale = t.output_scale;
            break;
        }
        case model_type::deeponet: {
            const auto& dn = static_cast<const deeponet_model&>(m);
            d.net_a = dn.spec_.branch_gamma;
            d.net_b = dn.spec_.branch_f;
            d.net_c = dn.spec_.trunk;
            d.sample_points = dn.sample_points();
            break;
        }
    }
    return d;
}

std::unique_ptr<operator_model> make_model(const model_descriptor& d) {
    switch (d.type) {
        case model_type::feedforward: return make_feedforward(d.net_a);
        case model_type::tdonet:
            return make_tdonet({d.net_a, d.net_b, d.net_c, d.output_scale});
        case model_type::deeponet:
            return make_deeponet({d.net_a, d.net_b, d.net_c}, d.sample_points);
    }
    fail(errc::invalid_argument, "unknown model type");
}

namespace {

loss_value loss_impl(const mat& pred, const mat& target, mat* dpred) {
    require(pred.rows == target.rows && pred.cols == target.cols,
            errc::invalid_argument, "loss: shape mismatch");
    if (dpred) {
        *dpred = mat(pred.rows, pred.cols);
    }
    loss_value out;
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.rows; ++i) {
        const double* p = pred.row(i);
        const double* y = target.row(i);
        double ny2 = 0.0, nd2 = 0.0;
        for (std::size_t j = 0; j < pred.cols; ++j) {
            ny2 += y[j] * y[j];
            const double d = p[j] - y[j];
            nd2 += d * d;
        }
        const double ny = std::sqrt(ny2);
        if (ny < 1e-12) {
            ++out.skipped;
            continue;
        }
        const double nd = std::sqrt(nd2);
        sum += nd / ny;
        ++out.counted;
        if (dpred && nd > 0.0) {
            double* g = dpred->row(i);
            const double c = 1.0 / (nd * ny);
            for (std::size_t j = 0; j < pred.cols; ++j)
                g[j] = c * (p[j] - y[j]);
        }
    }
    if (out.skipped)
        std::fprintf(stderr,
                     "warning: relative l2 loss skipped %zu of %zu samples "
                     "with target norm below 1e-12\n",
                     out.skipped, std::size_t(pred.rows));
    if (out.counted) {
        out.value = sum / double(out.counted);
        if (dpred)
            simd::scale(1.0 / double(out.counted), dpred->a.data(),
                        dpred->a.size());
    }
    return out;
}

}  // namespace

loss_value relative_l2_loss(const mat& pred, const mat& target) {
    return loss_impl(pred, target, nullptr);
}

loss_value relative_l2_loss_grad(const mat& pred, const mat& target,
                                 mat& dpred) {
    return loss_impl(pred, target, &dpred);
}

}  // namespace bie
