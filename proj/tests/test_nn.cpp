#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bie/errors.hpp"
#include "bie/nn.hpp"
#include "bie/rng.hpp"
#include "bie/train.hpp"
#include "bie/trig.hpp"

using namespace bie;

namespace {

mat random_mat(rng& gen, std::size_t r, std::size_t c) {
    mat M(r, c);
    for (double& v : M.a) v = gen.normal();
    return M;
}

mat hcat(const mat& A, const mat& B) {
    REQUIRE(A.rows == B.rows);
    mat C(A.rows, A.cols + B.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        for (std::size_t j = 0; j < A.cols; ++j) C(i, j) = A(i, j);
        for (std::size_t j = 0; j < B.cols; ++j) C(i, A.cols + j) = B(i, j);
    }
    return C;
}

double rel_gap(double a, double b) {
    return std::fabs(a - b) / std::max({1e-4, std::fabs(a), std::fabs(b)});
}

void gradcheck(operator_model& m, std::size_t batch, rng& gen,
               double tol = 1e-5) {
    mat Xa = random_mat(gen, batch, m.input_a_width());
    mat Xb = random_mat(gen, batch, m.input_b_width());
    mat Y = random_mat(gen, batch, m.output_width());

    m.zero_grads();
    mat pred = m.forward(Xa, Xb);
    mat dpred(pred.rows, pred.cols);
    relative_l2_loss_grad(pred, Y, dpred);
    m.backward(dpred);
    const std::vector<double> g = m.grads();

    const auto loss_at = [&]() {
        mat p = m.forward(Xa, Xb);
        return relative_l2_loss(p, Y).value;
    };
    const double h = 1e-6;
    const std::size_t P = m.param_count();
    for (int probe = 0; probe < 25; ++probe) {
        const std::size_t i = std::size_t(gen.next_u64() % P);
        const double save = m.params()[i];
        m.params()[i] = save + h;
        const double lp = loss_at();
        m.params()[i] = save - h;
        const double lm = loss_at();
        m.params()[i] = save;
        const double fd = (lp - lm) / (2.0 * h);
        CAPTURE(i);
        CHECK(rel_gap(g[i], fd) < tol);
    }
}

// feedforward helper driven by a copied parameter slice
mat run_fnn(const fnn_spec& spec, const std::vector<double>& params,
            std::size_t offset, const mat& X) {
    auto m = make_feedforward(spec);
    REQUIRE(offset + m->param_count() <= params.size());
    std::copy(params.begin() + offset,
              params.begin() + offset + m->param_count(), m->params().begin());
    mat empty(X.rows, 0);
    return m->forward(X, empty);
}

}  // namespace

TEST_CASE("fnn forward matches hand arithmetic") {
    // widths [2, 2, 1]: y = W2 tanh(W1 x + b1) + b2
    fnn_spec spec;
    spec.widths = {2, 2, 1};
    auto m = make_feedforward(spec);
    REQUIRE(m->param_count() == 2 * 2 + 2 + 2 * 1 + 1);
    std::vector<double>& p = m->params();
    // W1 = [[1, -1], [0.5, 0.25]], b1 = [0.1, -0.2]
    p = {1.0, -1.0, 0.5, 0.25, 0.1, -0.2,
         // W2 = [2, -3], b2 = [0.7]
         2.0, -3.0, 0.7};
    mat X(1, 2);
    X(0, 0) = 0.3;
    X(0, 1) = -0.6;
    mat empty(1, 0);
    const mat Y = m->forward(X, empty);
    const double h1 = std::tanh(1.0 * 0.3 + (-1.0) * (-0.6) + 0.1);
    const double h2 = std::tanh(0.5 * 0.3 + 0.25 * (-0.6) - 0.2);
    CHECK(Y(0, 0) == doctest::Approx(2.0 * h1 - 3.0 * h2 + 0.7).epsilon(1e-14));
}

TEST_CASE("glorot initialization: bounded weights, zero biases, seeded") {
    fnn_spec spec;
    spec.widths = {10, 20};
    auto a = make_feedforward(spec);
    auto b = make_feedforward(spec);
    a->init(5);
    b->init(5);
    CHECK(a->params() == b->params());
    b->init(6);
    CHECK(a->params() != b->params());

    const double limit = std::sqrt(6.0 / (10 + 20));
    const std::vector<double>& p = a->params();
    double wmax = 0.0;
    for (std::size_t i = 0; i < 200; ++i) wmax = std::max(wmax, std::fabs(p[i]));
    CHECK(wmax <= limit);
    CHECK(wmax > 0.2 * limit);  // actually random, not degenerate
    for (std::size_t i = 200; i < 220; ++i) CHECK(p[i] == 0.0);
}

TEST_CASE("architecture invariants are enforced") {
    fnn_spec bad;
    bad.widths = {5};
    CHECK_THROWS_AS((void)make_feedforward(bad), error);

    tdonet_spec t;
    t.v_net.widths = {8, 16, 4};
    t.sigma_net.widths = {4, 16, 3};  // latent width mismatch
    t.u_net.widths = {8, 16, 6};
    CHECK_THROWS_AS((void)make_tdonet(t), error);

    deeponet_spec d;
    d.branch_gamma.widths = {12, 10, 5};
    d.branch_f.widths = {6, 10, 4};  // latent width mismatch
    d.trunk.widths = {1, 10, 5};
    CHECK_THROWS_AS((void)make_deeponet(d, 6), error);
}

TEST_CASE("gradients: feedforward") {
    rng gen(101);
    fnn_spec spec;
    spec.widths = {5, 8, 3};
    for (int draw = 0; draw < 5; ++draw) {
        auto m = make_feedforward(spec);
        m->init(1000 + std::uint64_t(draw));
        gradcheck(*m, 3, gen);
    }
}

TEST_CASE("gradients: tdonet including the fixed output scale") {
    rng gen(202);
    tdonet_spec spec;
    spec.v_net.widths = {8, 16, 4};
    spec.sigma_net.widths = {4, 16, 4};
    spec.u_net.widths = {8, 16, 6};
    for (double scale : {1.0, 0.1}) {
        spec.output_scale = scale;
        for (int draw = 0; draw < 5; ++draw) {
            auto m = make_tdonet(spec);
            m->init(2000 + std::uint64_t(draw));
            gradcheck(*m, 3, gen);
        }
    }
}

TEST_CASE("gradients: deeponet") {
    rng gen(303);
    deeponet_spec spec;
    spec.branch_gamma.widths = {12, 10, 5};
    spec.branch_f.widths = {6, 10, 5};
    spec.trunk.widths = {1, 10, 5};
    for (int draw = 0; draw < 5; ++draw) {
        auto m = make_deeponet(spec, 6);
        m->init(3000 + std::uint64_t(draw));
        gradcheck(*m, 3, gen);
    }
}

TEST_CASE("tdonet gate surgery: ones gate reduces to plain composition") {
    tdonet_spec spec;
    spec.v_net.widths = {7, 9, 4};
    spec.sigma_net.widths = {3, 9, 4};
    spec.u_net.widths = {7, 9, 5};
    spec.output_scale = 0.1;
    auto m = make_tdonet(spec);
    m->init(77);

    // force sigma(g) == 1: zero all sigma parameters, then set the output
    // bias of its last layer to one
    fnn_block vb(spec.v_net, 0);
    fnn_block sb(spec.sigma_net, vb.param_end());
    for (std::size_t i = vb.param_end(); i < sb.param_end(); ++i)
        m->params()[i] = 0.0;
    for (std::size_t i = sb.param_end() - 4; i < sb.param_end(); ++i)
        m->params()[i] = 1.0;

    rng gen(9);
    const mat G = random_mat(gen, 3, 3);
    const mat F = random_mat(gen, 3, 4);
    const mat out = m->forward(G, F);

    const mat vout = run_fnn(spec.v_net, m->params(), 0, hcat(G, F));
    mat uout = run_fnn(spec.u_net, m->params(), sb.param_end(), hcat(G, vout));
    for (double& v : uout.a) v *= spec.output_scale;
    REQUIRE(out.rows == uout.rows);
    REQUIRE(out.cols == uout.cols);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.a.size(); ++i)
        worst = std::max(worst, std::fabs(out.a[i] - uout.a[i]));
    CHECK(worst < 1e-14);
}

TEST_CASE("tdonet gate surgery: zero gate annihilates the v branch") {
    tdonet_spec spec;
    spec.v_net.widths = {7, 9, 4};
    spec.sigma_net.widths = {3, 9, 4};
    spec.u_net.widths = {7, 9, 5};
    auto m = make_tdonet(spec);
    m->init(78);

    fnn_block vb(spec.v_net, 0);
    fnn_block sb(spec.sigma_net, vb.param_end());
    for (std::size_t i = vb.param_end(); i < sb.param_end(); ++i)
        m->params()[i] = 0.0;

    rng gen(10);
    const mat G = random_mat(gen, 2, 3);
    const mat F1 = random_mat(gen, 2, 4);
    const mat F2 = random_mat(gen, 2, 4);
    const mat o1 = m->forward(G, F1);
    const mat o2 = m->forward(G, F2);  // f no longer matters
    double worst = 0.0;
    for (std::size_t i = 0; i < o1.a.size(); ++i)
        worst = std::max(worst, std::fabs(o1.a[i] - o2.a[i]));
    CHECK(worst == 0.0);

    const mat zeros(2, 4);
    mat uout = run_fnn(spec.u_net, m->params(), sb.param_end(), hcat(G, zeros));
    for (std::size_t i = 0; i < o1.a.size(); ++i)
        CHECK(o1.a[i] == doctest::Approx(uout.a[i]).epsilon(1e-14));
}

TEST_CASE("deeponet forward is the product fusion over the latent index") {
    deeponet_spec spec;
    spec.branch_gamma.widths = {8, 6, 4};
    spec.branch_f.widths = {4, 6, 4};
    spec.trunk.widths = {1, 6, 4};
    const std::size_t p = 4;
    auto m = make_deeponet(spec, p);
    m->init(55);

    rng gen(14);
    const mat G = random_mat(gen, 2, 8);
    const mat F = random_mat(gen, 2, 4);
    const mat out = m->forward(G, F);
    REQUIRE(out.cols == p);

    fnn_block bg(spec.branch_gamma, 0);
    fnn_block bf(spec.branch_f, bg.param_end());
    fnn_block tr(spec.trunk, bf.param_end());
    const double bias = m->params()[tr.param_end()];
    REQUIRE(m->param_count() == tr.param_end() + 1);

    const mat Bg = run_fnn(spec.branch_gamma, m->params(), 0, G);
    const mat Bf = run_fnn(spec.branch_f, m->params(), bg.param_end(), F);
    const std::vector<double> ts = uniform_grid(p);
    mat T(p, 1);
    for (std::size_t j = 0; j < p; ++j) T(j, 0) = ts[j];
    const mat Tq = run_fnn(spec.trunk, m->params(), bf.param_end(), T);

    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double acc = bias;
            for (std::size_t q = 0; q < 4; ++q)
                acc += Bg(i, q) * Bf(i, q) * Tq(j, q);
            CHECK(out(i, j) == doctest::Approx(acc).epsilon(1e-13));
        }
}

TEST_CASE("relative l2 loss: pinned examples") {
    mat y(2, 3);
    y(0, 0) = 1.0;
    y(0, 1) = 2.0;
    y(0, 2) = -1.0;
    y(1, 0) = 0.5;
    y(1, 1) = 0.0;
    y(1, 2) = 4.0;
    mat pred = y;
    for (double& v : pred.a) v *= 2.0;  // pred = 2y -> per-sample error 1
    const loss_value l = relative_l2_loss(pred, y);
    CHECK(l.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l.counted == 2);
    CHECK(l.skipped == 0);

    // per-sample errors 0.1 and 0.3 average to 0.2
    mat y2(2, 1), p2(2, 1);
    y2(0, 0) = 1.0;
    p2(0, 0) = 1.1;
    y2(1, 0) = 2.0;
    p2(1, 0) = 2.6;
    CHECK(relative_l2_loss(p2, y2).value == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("relative l2 loss skips rows with vanishing targets") {
    mat y(3, 2), pred(3, 2);
    y(0, 0) = 1.0;
    y(2, 1) = 2.0;
    // row 1 target is exactly zero
    pred(0, 0) = 1.0;
    pred(1, 0) = 9.0;
    pred(2, 1) = 1.0;
    mat dpred(3, 2);
    const loss_value l = relative_l2_loss_grad(pred, y, dpred);
    CHECK(l.counted == 2);
    CHECK(l.skipped == 1);
    CHECK(l.value == doctest::Approx(0.25));  // (0 + 0.5) / 2
    CHECK(dpred(1, 0) == 0.0);  // skipped row contributes no gradient
    CHECK(dpred(1, 1) == 0.0);
    CHECK(dpred(0, 0) == 0.0);  // zero difference row has zero gradient
}

TEST_CASE("loss gradient matches finite differences") {
    rng gen(88);
    mat y = random_mat(gen, 4, 5);
    mat pred = random_mat(gen, 4, 5);
    mat dpred(4, 5);
    relative_l2_loss_grad(pred, y, dpred);
    const double h = 1e-6;
    for (std::size_t i = 0; i < pred.a.size(); i += 3) {
        const double save = pred.a[i];
        pred.a[i] = save + h;
        const double lp = relative_l2_loss(pred, y).value;
        pred.a[i] = save - h;
        const double lm = relative_l2_loss(pred, y).value;
        pred.a[i] = save;
        CHECK(rel_gap(dpred.a[i], (lp - lm) / (2 * h)) < 1e-5);
    }
}

TEST_CASE("staircase schedule: pinned decay points") {
    train_config cfg;
    cfg.schedule = lr_schedule_kind::inverse_time_staircase;
    cfg.lr0 = 1e-3;
    cfg.factor = 0.5;
    cfg.period = 0;  // defaults to total/100
    const lr_controller sched(cfg, 1000, 10);
    CHECK(sched.step_lr(0) == doctest::Approx(1e-3));
    CHECK(sched.step_lr(9) == doctest::Approx(1e-3));
    CHECK(sched.step_lr(10) == doctest::Approx(5e-4));
    CHECK(sched.step_lr(20) == doctest::Approx(2.5e-4));
    CHECK(sched.step_lr(999) == doctest::Approx(1e-3 * std::pow(0.5, 99)));

    train_config cfg2 = cfg;
    cfg2.period = 7;
    const lr_controller s2(cfg2, 1000, 10);
    CHECK(s2.step_lr(6) == doctest::Approx(1e-3));
    CHECK(s2.step_lr(7) == doctest::Approx(5e-4));
}

TEST_CASE("plateau schedule halves only after patience is exceeded") {
    train_config cfg;
    cfg.schedule = lr_schedule_kind::plateau_halve;
    cfg.lr0 = 1e-3;
    cfg.factor = 0.5;
    cfg.patience = 0;  // defaults to epochs/100
    lr_controller sched(cfg, 0, 300);  // patience = 3

    sched.note_epoch_loss(1.0);
    CHECK(sched.current() == doctest::Approx(1e-3));
    sched.note_epoch_loss(0.9);  // new best
    for (int i = 0; i < 3; ++i) sched.note_epoch_loss(0.9);  // ages 1..3
    CHECK(sched.current() == doctest::Approx(1e-3));  // not yet exceeded
    sched.note_epoch_loss(0.9);  // age 4 > 3 -> halve
    CHECK(sched.current() == doctest::Approx(5e-4));

    // a fresh best resets the clock; patience+1 flat epochs then halve once
    sched.note_epoch_loss(0.5);
    for (int i = 0; i < 4; ++i) sched.note_epoch_loss(0.5);
    CHECK(sched.current() == doctest::Approx(2.5e-4));
}

TEST_CASE("learning rate never increases under any loss sequence") {
    train_config cfg;
    cfg.schedule = lr_schedule_kind::plateau_halve;
    cfg.lr0 = 1e-3;
    lr_controller sched(cfg, 0, 100);
    rng gen(6);
    double prev = sched.current();
    for (int i = 0; i < 200; ++i) {
        sched.note_epoch_loss(gen.uniform(0.0, 1.0));
        CHECK(sched.current() <= prev);
        prev = sched.current();
    }
}

TEST_CASE("training memorizes a small sample set") {
    rng gen(404);
    model_tensors data;
    data.Xa = random_mat(gen, 32, 4);
    data.Xb = mat(32, 0);
    data.Y = random_mat(gen, 32, 3);

    fnn_spec spec;
    spec.widths = {4, 64, 64, 3};
    auto m = make_feedforward(spec);

    // The relative loss keeps a unit-magnitude gradient direction near the
    // optimum, so memorization needs a high initial rate plus annealing:
    // halve every 500 full-batch steps.
    train_config cfg;
    cfg.epochs = 5000;
    cfg.batch_size = 32;
    cfg.lr0 = 1e-2;
    cfg.schedule = lr_schedule_kind::inverse_time_staircase;
    cfg.period = 500;
    cfg.seed = 12;
    const train_result res = train_model(*m, data, data, cfg);
    CHECK(res.best_test_loss < 1e-3);
    CHECK(res.history.size() == 5000);
}

TEST_CASE("training is bitwise deterministic") {
    rng gen(505);
    model_tensors data;
    data.Xa = random_mat(gen, 16, 3);
    data.Xb = mat(16, 0);
    data.Y = random_mat(gen, 16, 2);

    fnn_spec spec;
    spec.widths = {3, 8, 2};
    train_config cfg;
    cfg.epochs = 30;
    cfg.batch_size = 8;
    cfg.seed = 77;

    auto m1 = make_feedforward(spec);
    auto m2 = make_feedforward(spec);
    const train_result r1 = train_model(*m1, data, data, cfg);
    const train_result r2 = train_model(*m2, data, data, cfg);
    REQUIRE(r1.history.size() == r2.history.size());
    for (std::size_t i = 0; i < r1.history.size(); ++i) {
        CHECK(r1.history[i].train_loss == r2.history[i].train_loss);
        CHECK(r1.history[i].test_loss == r2.history[i].test_loss);
        CHECK(r1.history[i].lr == r2.history[i].lr);
    }
    CHECK(m1->params() == m2->params());
    CHECK(r1.best_epoch == r2.best_epoch);
}

TEST_CASE("the best-test snapshot is restored into the model") {
    rng gen(606);
    model_tensors train_set, test_set;
    train_set.Xa = random_mat(gen, 24, 3);
    train_set.Xb = mat(24, 0);
    train_set.Y = random_mat(gen, 24, 2);
    test_set.Xa = random_mat(gen, 8, 3);
    test_set.Xb = mat(8, 0);
    test_set.Y = random_mat(gen, 8, 2);  // unrelated -> test loss will wander

    fnn_spec spec;
    spec.widths = {3, 16, 2};
    auto m = make_feedforward(spec);
    train_config cfg;
    cfg.epochs = 200;
    cfg.batch_size = 24;
    cfg.seed = 3;
    const train_result res = train_model(*m, train_set, test_set, cfg);

    // evaluating the restored parameters must reproduce best_test_loss
    mat pred = m->forward(test_set.Xa, test_set.Xb);
    const loss_value l = relative_l2_loss(pred, test_set.Y);
    CHECK(l.value == doctest::Approx(res.best_test_loss).epsilon(1e-12));
    double best = 1e300;
    for (const epoch_stats& e : res.history) best = std::min(best, e.test_loss);
    CHECK(res.best_test_loss == best);
}

TEST_CASE("non-finite data aborts with a divergence error") {
    model_tensors data;
    data.Xa = mat(4, 2);
    data.Xa(0, 0) = std::nan("");
    data.Xb = mat(4, 0);
    data.Y = mat(4, 2);
    for (double& v : data.Y.a) v = 1.0;

    fnn_spec spec;
    spec.widths = {2, 4, 2};
    auto m = make_feedforward(spec);
    train_config cfg;
    cfg.epochs = 3;
    cfg.batch_size = 4;
    try {
        (void)train_model(*m, data, data, cfg);
        FAIL("expected divergence");
    } catch (const error& e) {
        CHECK(e.code() == errc::divergence);
    }
}

TEST_CASE("evaluate: zero model has mean relative error exactly one") {
    rng gen(707);
    model_tensors data;
    data.Xa = random_mat(gen, 50, 4);
    data.Xb = mat(50, 0);
    data.Y = random_mat(gen, 50, 3);

    fnn_spec spec;
    spec.widths = {4, 3};
    auto m = make_feedforward(spec);  // params default to zero -> output zero
    const eval_metrics met = evaluate_model(*m, data);
    CHECK(met.count == 50);
    CHECK(std::fabs(met.mre - 1.0) <= 1e-12);
    CHECK(met.var_mre <= 1e-24);
    double mean_norm = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j) s += data.Y(i, j) * data.Y(i, j);
        mean_norm += std::sqrt(s);
    }
    mean_norm /= 50.0;
    CHECK(met.mne == doctest::Approx(mean_norm).epsilon(1e-12));
}

TEST_CASE("evaluate: a perfect oracle model yields the zero row") {
    rng gen(808);
    model_tensors data;
    data.Xa = random_mat(gen, 10, 3);
    data.Xb = mat(10, 0);
    data.Y = data.Xa;  // oracle target: identity

    fnn_spec spec;
    spec.widths = {3, 3};
    auto m = make_feedforward(spec);
    // set W = I, b = 0
    for (std::size_t i = 0; i < 3; ++i) m->params()[i * 3 + i] = 1.0;
    const eval_metrics met = evaluate_model(*m, data);
    CHECK(met.mne == 0.0);
    CHECK(met.mre == 0.0);
    CHECK(met.var_mne == 0.0);
    CHECK(met.var_mre == 0.0);
    CHECK(met.mean_time_ms >= 0.0);

    CHECK(metrics_header() == "MNE,MRE,variance-MNE,variance-MRE,Mean-Time/ms");
    const std::string row = metrics_row(met);
    std::size_t commas = 0;
    for (char c : row) commas += (c == ',');
    CHECK(commas == 4);
    CHECK(row.substr(0, 4) == "0,0,");
}

TEST_CASE("evaluate rejects an all-degenerate target set") {
    model_tensors data;
    data.Xa = mat(3, 2);
    data.Xb = mat(3, 0);
    data.Y = mat(3, 2);  // all targets zero
    fnn_spec spec;
    spec.widths = {2, 2};
    auto m = make_feedforward(spec);
    CHECK_THROWS_AS((void)evaluate_model(*m, data), error);
}

TEST_CASE("describe/make_model reconstructs architectures") {
    tdonet_spec spec;
    spec.v_net.widths = {6, 7, 3};
    spec.sigma_net.widths = {2, 7, 3};
    spec.u_net.widths = {5, 7, 4};
    spec.output_scale = 0.25;
    auto m = make_tdonet(spec);
    m->init(1);
    const model_descriptor d = describe(*m);
    auto m2 = make_model(d);
    CHECK(m2->type() == model_type::tdonet);
    CHECK(m2->param_count() == m->param_count());
    CHECK(m2->input_a_width() == m->input_a_width());
    CHECK(m2->output_width() == m->output_width());
}

TEST_CASE("forward validates batch widths") {
    fnn_spec spec;
    spec.widths = {4, 2};
    auto m = make_feedforward(spec);
    mat bad(2, 3), empty(2, 0);
    CHECK_THROWS_AS((void)m->forward(bad, empty), error);
}
