#include "bie/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "bie/errors.hpp"
#include "bie/rng.hpp"
#include "bie/simd.hpp"
#include "bie/trig.hpp"

namespace bie {

lr_controller::lr_controller(const train_config& cfg, std::size_t total_steps,
                             std::size_t total_epochs)
    : kind_(cfg.schedule), lr0_(cfg.lr0), factor_(cfg.factor), lr_(cfg.lr0) {
    require(cfg.lr0 > 0.0, errc::invalid_argument, "lr0 must be positive");
    require(cfg.factor > 0.0 && cfg.factor < 1.0, errc::invalid_argument,
            "decay factor must lie in (0, 1)");
    period_ = cfg.period ? cfg.period : std::max<std::size_t>(1, total_steps / 100);
    patience_ = cfg.patience ? cfg.patience : total_epochs / 100;
}

double lr_controller::step_lr(std::size_t step) const {
    if (kind_ != lr_schedule_kind::inverse_time_staircase) return lr_;
    return lr0_ * std::pow(factor_, double(step / period_));
}

void lr_controller::note_epoch_loss(double loss) {
    if (kind_ != lr_schedule_kind::plateau_halve) return;
    if (!have_best_ || loss < best_) {
        best_ = loss;
        have_best_ = true;
        age_ = 0;
        return;
    }
    if (++age_ > patience_) {
        lr_ *= factor_;
        age_ = 0;
    }
}

namespace {

void check_tensors(const operator_model& model, const model_tensors& d,
                   const char* what) {
    require(d.Xa.rows == d.Y.rows && (d.Xb.cols == 0 || d.Xb.rows == d.Y.rows),
            errc::invalid_argument, "tensor row counts differ");
    require(d.Y.rows > 0, errc::invalid_argument,
            std::string(what) + ": empty sample set");
    require(d.Xa.cols == model.input_a_width() &&
                d.Xb.cols == model.input_b_width() &&
                d.Y.cols == model.output_width(),
            errc::invalid_argument,
            std::string(what) + ": tensor widths do not match the model");
}

mat gather_rows(const mat& X, const std::vector<std::size_t>& idx,
                std::size_t first, std::size_t count) {
    mat B(count, X.cols);
    for (std::size_t i = 0; i < count; ++i) {
        const double* src = X.row(idx[first + i]);
        double* dst = B.row(i);
        for (std::size_t j = 0; j < X.cols; ++j) dst[j] = src[j];
    }
    return B;
}

double batched_test_loss(operator_model& model, const model_tensors& d,
                         std::size_t* skipped) {
    const mat pred = model.forward(d.Xa, d.Xb);
    const loss_value lv = relative_l2_loss(pred, d.Y);
    if (skipped) *skipped += lv.skipped;
    return lv.value;
}

}  // namespace

model_tensors coefficient_tensors(const dataset& ds) {
    require(!ds.records.empty(), errc::invalid_argument,
            "coefficient_tensors: empty dataset");
    const std::size_t N = ds.records.size();
    model_tensors t;
    t.Xa = mat(N, ds.gamma_len());
    t.Xb = mat(N, ds.field_len());
    t.Y = mat(N, ds.field_len());
    for (std::size_t i = 0; i < N; ++i) {
        const dataset_record& r = ds.records[i];
        require(r.gamma.size() == t.Xa.cols && r.rhs.size() == t.Xb.cols &&
                    r.density.size() == t.Y.cols,
                errc::invalid_argument, "coefficient_tensors: ragged record");
        std::copy(r.gamma.begin(), r.gamma.end(), t.Xa.row(i));
        std::copy(r.rhs.begin(), r.rhs.end(), t.Xb.row(i));
        std::copy(r.density.begin(), r.density.end(), t.Y.row(i));
    }
    return t;
}

model_tensors sampled_tensors(const dataset& ds, std::size_t p) {
    require(!ds.records.empty(), errc::invalid_argument,
            "sampled_tensors: empty dataset");
    require(ds.components == 1, errc::unsupported,
            "sampled_tensors: only scalar families are supported");
    const std::size_t N = ds.records.size();
    model_tensors t;
    t.Xa = mat(N, 2 * p);
    t.Xb = mat(N, p);
    t.Y = mat(N, p);
    const std::size_t nb = coeff_len(ds.n_b);
    for (std::size_t i = 0; i < N; ++i) {
        const dataset_record& r = ds.records[i];
        require(r.gamma.size() == 2 * nb, errc::invalid_argument,
                "sampled_tensors: ragged record");
        const coeff_vec cx(r.gamma.begin(), r.gamma.begin() + nb);
        const coeff_vec cy(r.gamma.begin() + nb, r.gamma.end());
        const std::vector<double> sx = trig_synth(cx, p);
        const std::vector<double> sy = trig_synth(cy, p);
        const std::vector<double> sf = trig_synth(r.rhs, p);
        const std::vector<double> su = trig_synth(r.density, p);
        double* xa = t.Xa.row(i);
        std::copy(sx.begin(), sx.end(), xa);
        std::copy(sy.begin(), sy.end(), xa + p);
        std::copy(sf.begin(), sf.end(), t.Xb.row(i));
        std::copy(su.begin(), su.end(), t.Y.row(i));
    }
    return t;
}

train_result train_model(operator_model& model, const model_tensors& train_set,
                         const model_tensors& test_set,
                         const train_config& cfg) {
    check_tensors(model, train_set, "train");
    check_tensors(model, test_set, "train (test split)");
    require(cfg.epochs >= 1 && cfg.batch_size >= 1, errc::invalid_argument,
            "train: epochs and batch size must be >= 1");

    const std::size_t N = train_set.Y.rows;
    const std::size_t batch = std::min(cfg.batch_size, N);
    const std::size_t steps_per_epoch = (N + batch - 1) / batch;
    lr_controller sched(cfg, cfg.epochs * steps_per_epoch, cfg.epochs);

    model.init(mix_seed(cfg.seed, 0));
    rng order(mix_seed(cfg.seed, 1));

    const std::size_t P = model.param_count();
    std::vector<double> m1(P, 0.0), m2(P, 0.0);
    double b1t = 1.0, b2t = 1.0;

    std::vector<std::size_t> idx(N);
    for (std::size_t i = 0; i < N; ++i) idx[i] = i;

    train_result out;
    out.best_test_loss = 0.0;
    bool have_best = false;
    std::size_t step = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        order.shuffle(idx);
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        double lr_used = sched.current();

        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            const std::size_t first = s * batch;
            const std::size_t count = std::min(batch, N - first);
            const mat Xa = gather_rows(train_set.Xa, idx, first, count);
            const mat Xb = train_set.Xb.cols
                               ? gather_rows(train_set.Xb, idx, first, count)
                               : mat(count, 0);
            const mat Y = gather_rows(train_set.Y, idx, first, count);

            const mat pred = model.forward(Xa, Xb);
            mat dpred;
            const loss_value lv = relative_l2_loss_grad(pred, Y, dpred);
            require(std::isfinite(lv.value), errc::divergence,
                    "train: loss diverged at epoch " + std::to_string(epoch));
            loss_sum += lv.value * double(lv.counted);
            loss_count += lv.counted;
            out.skipped_samples += lv.skipped;

            model.zero_grads();
            model.backward(dpred);
            const std::vector<double>& g = model.grads();
            for (double gv : g)
                require(std::isfinite(gv), errc::divergence,
                        "train: gradient diverged at epoch " +
                            std::to_string(epoch));

            lr_used = sched.step_lr(step);
            b1t *= cfg.beta1;
            b2t *= cfg.beta2;
            simd::kernels().adam_update(model.params().data(), m1.data(),
                                        m2.data(), g.data(), P, cfg.beta1,
                                        cfg.beta2, cfg.eps, lr_used,
                                        1.0 - b1t, 1.0 - b2t);
            ++step;
        }

        const double train_loss =
            loss_count ? loss_sum / double(loss_count) : 0.0;
        const double test_loss =
            batched_test_loss(model, test_set, &out.skipped_samples);
        require(std::isfinite(test_loss), errc::divergence,
                "train: test loss diverged at epoch " + std::to_string(epoch));
        out.history.push_back({epoch, train_loss, test_loss, lr_used});

        if (!have_best || test_loss < out.best_test_loss) {
            have_best = true;
            out.best_test_loss = test_loss;
            out.best_epoch = epoch;
            out.best_params = model.params();
        }
        sched.note_epoch_loss(train_loss);
    }

    model.params() = out.best_params;
    return out;
}

void write_training_log(const std::string& path,
                        const std::vector<epoch_stats>& history) {
    std::ofstream f(path);
    require(f.good(), errc::io_error, "cannot open " + path);
    f << "epoch,train_loss,test_loss,lr\n";
    char buf[160];
    for (const epoch_stats& e : history) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e.epoch,
                      e.train_loss, e.test_loss, e.lr);
        f << buf;
    }
    require(f.good(), errc::io_error, "write failed: " + path);
}

eval_metrics evaluate_model(operator_model& model, const model_tensors& data) {
    require(data.Y.rows > 0, errc::invalid_argument,
            "evaluate: empty test set");
    check_tensors(model, data, "evaluate");

    const auto t0 = std::chrono::steady_clock::now();
    const mat pred = model.forward(data.Xa, data.Xb);
    const auto t1 = std::chrono::steady_clock::now();

    const std::size_t N = data.Y.rows;
    std::vector<double> ne(N), re;
    re.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double* p = pred.row(i);
        const double* y = data.Y.row(i);
        double nd2 = 0.0, ny2 = 0.0;
        for (std::size_t j = 0; j < data.Y.cols; ++j) {
            const double d = p[j] - y[j];
            nd2 += d * d;
            ny2 += y[j] * y[j];
        }
        ne[i] = std::sqrt(nd2);
        if (std::sqrt(ny2) >= 1e-12) re.push_back(ne[i] / std::sqrt(ny2));
    }
    require(!re.empty(), errc::invalid_argument,
            "evaluate: every target norm is below 1e-12");

    const auto mean_var = [](const std::vector<double>& v, double& mu,
                             double& var) {
        mu = 0.0;
        for (double x : v) mu += x;
        mu /= double(v.size());
        var = 0.0;
        for (double x : v) var += (x - mu) * (x - mu);
        var /= double(v.size());
    };
    eval_metrics m;
    m.count = N;
    mean_var(ne, m.mne, m.var_mne);
    mean_var(re, m.mre, m.var_mre);
    m.mean_time_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count() / double(N);
    return m;
}

std::string metrics_header() {
    return "MNE,MRE,variance-MNE,variance-MRE,Mean-Time/ms";
}

std::string metrics_row(const eval_metrics& m) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g", m.mne,
                  m.mre, m.var_mne, m.var_mre, m.mean_time_ms);
    return buf;
}

}  // namespace bie
