#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include <trackref/core/errors.hpp>
#include <trackref/kalman/kalman_filter.hpp>
#include <trackref/kalman/nkf_train.hpp>
#include <trackref/kalman/noise_net.hpp>

#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace trackref;
using namespace trackref::kalman;

namespace {

Mat8 random_psd8(std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Mat8 a;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) a(r, c) = dist(rng);
    return a * a.transpose() + 0.1 * Mat8::Identity();
}

Vec8 random_vec8(std::mt19937& rng, double span = 10.0) {
    std::uniform_real_distribution<double> dist(-span, span);
    Vec8 v;
    for (int i = 0; i < 8; ++i) v[i] = dist(rng);
    return v;
}

bool is_psd(const Mat8& m, double floor = -1e-8) {
    Eigen::SelfAdjointEigenSolver<Mat8> es(m);
    return es.eigenvalues().minCoeff() >= floor;
}

// Straight-line sequence with optional observation noise, center form.
NkfSequence line_sequence(int frames, double sigma, std::mt19937& rng, double vx = 2.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    NkfSequence seq;
    for (int k = 0; k < frames; ++k) {
        Vec4 gt(50.0 + vx * k, 40.0 + 0.5 * k, 0.5, 20.0);
        Vec4 z = gt;
        if (sigma > 0.0) {
            z[0] += noise(rng);
            z[1] += noise(rng);
            z[3] += noise(rng);
        }
        seq.gt.push_back(gt);
        seq.obs.push_back(z);
    }
    return seq;
}

}  // namespace

TEST_CASE("kf_init matches the documented covariance formula") {
    Vec4 z(10, 20, 0.5, 8);
    FilterState s = kf_init(z);
    for (int i = 0; i < 4; ++i) CHECK(s.mean[i] == z[i]);
    for (int i = 4; i < 8; ++i) CHECK(s.mean[i] == 0.0);

    const double wp = 1.0 / 20.0, wv = 1.0 / 160.0, h = 8.0;
    Vec8 expect_std;
    expect_std << 2 * wp * h, 2 * wp * h, 1e-2, 2 * wp * h, 10 * wv * h, 10 * wv * h, 1e-5,
        10 * wv * h;
    for (int i = 0; i < 8; ++i) {
        CHECK(s.covariance(i, i) == doctest::Approx(expect_std[i] * expect_std[i]).epsilon(1e-12));
        for (int j = 0; j < 8; ++j)
            if (i != j) CHECK(s.covariance(i, j) == 0.0);
    }
    CHECK(is_psd(s.covariance));
}

TEST_CASE("kf_predict constant velocity and covariance propagation") {
    FilterState s;
    s.mean << 0, 0, 1, 2, 1, 0, 0, 0;
    s.covariance = Mat8::Zero();
    FilterState pred = kf_predict(s, motion_model(), Mat8::Zero());
    CHECK(pred.mean[0] == 1.0);  // cx advanced by vx
    CHECK(pred.mean[1] == 0.0);
    CHECK(pred.mean[2] == 1.0);
    CHECK(pred.mean[3] == 2.0);

    FilterState pred2 = kf_predict(s, motion_model(), Mat8::Identity());
    CHECK((pred2.covariance - Mat8::Identity()).norm() == doctest::Approx(0.0));
}

TEST_CASE("kf_predict matches a naive triple-loop oracle") {
    std::mt19937 rng(3);
    const MotionModel& m = motion_model();
    for (int trial = 0; trial < 20; ++trial) {
        FilterState s;
        s.mean = random_vec8(rng);
        s.covariance = random_psd8(rng);
        Mat8 q = random_psd8(rng);
        Mat8 q_diag = q.diagonal().asDiagonal();
        FilterState pred = kf_predict(s, m, q_diag);

        // naive: F cov F^T + Q, element by element
        Mat8 fc = Mat8::Zero();
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                for (int k = 0; k < 8; ++k) fc(i, j) += m.F(i, k) * s.covariance(k, j);
        Mat8 expect = Mat8::Zero();
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                for (int k = 0; k < 8; ++k) expect(i, j) += fc(i, k) * m.F(j, k);
                expect(i, j) += q_diag(i, j);
            }
        expect = 0.5 * (expect + expect.transpose());
        CHECK((pred.covariance - expect).cwiseAbs().maxCoeff() < 1e-10);
        for (int i = 0; i < 8; ++i) {
            double mi = 0;
            for (int k = 0; k < 8; ++k) mi += m.F(i, k) * s.mean[k];
            CHECK(pred.mean[i] == doctest::Approx(mi).epsilon(1e-12));
        }
    }
}

TEST_CASE("kalman gain scalar analogues") {
    // P' = I, R = I: innovation covariance 2I, gain 0.5 on observed dims
    Mat84 k = kf_gain(Mat8::Identity(), motion_model(), Mat4::Identity());
    for (int i = 0; i < 4; ++i) CHECK(k(i, i) == doctest::Approx(0.5).epsilon(1e-12));

    // R -> 0+: full trust in the observation, H K -> I
    Mat84 k0 = kf_gain(Mat8::Identity(), motion_model(), 1e-12 * Mat4::Identity());
    Mat4 hk = motion_model().H * k0;
    CHECK((hk - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-6);

    // R large: gain goes to zero
    Mat84 kinf = kf_gain(Mat8::Identity(), motion_model(), 1e12 * Mat4::Identity());
    CHECK(kinf.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("kalman gain residual check on random PSD covariances") {
    std::mt19937 rng(5);
    const MotionModel& m = motion_model();
    for (int trial = 0; trial < 50; ++trial) {
        Mat8 p = random_psd8(rng);
        Mat4 r = Mat4::Identity() * std::uniform_real_distribution<double>(0.1, 2.0)(rng);
        Mat84 k = kf_gain(p, m, r);
        Mat4 s = m.H * p * m.H.transpose() + r;
        Mat84 residual = k * s - p * m.H.transpose();
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("kf_update zero innovation leaves the mean unchanged") {
    std::mt19937 rng(7);
    FilterState pred;
    pred.mean = random_vec8(rng);
    pred.covariance = random_psd8(rng);
    Vec4 z = motion_model().H * pred.mean;
    FilterState post = kf_update(pred, z, motion_model(), Mat4::Identity());
    CHECK((post.mean - pred.mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kf_update scalar analogue is the equal-trust average") {
    FilterState pred;
    pred.mean = Vec8::Zero();
    pred.covariance = Mat8::Identity();
    Vec4 z(2, 2, 2, 2);
    FilterState post = kf_update(pred, z, motion_model(), Mat4::Identity());
    for (int i = 0; i < 4; ++i) CHECK(post.mean[i] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("kf_update matches the information-form update") {
    std::mt19937 rng(9);
    const MotionModel& m = motion_model();
    for (int trial = 0; trial < 50; ++trial) {
        FilterState pred;
        pred.mean = random_vec8(rng);
        pred.covariance = random_psd8(rng);
        Vec4 z;
        for (int i = 0; i < 4; ++i) z[i] = std::uniform_real_distribution<double>(-5, 5)(rng);
        Mat4 r = Mat4::Identity() * std::uniform_real_distribution<double>(0.2, 3.0)(rng);

        FilterState post = kf_update(pred, z, m, r);

        Mat8 info = pred.covariance.inverse() + m.H.transpose() * r.inverse() * m.H;
        Mat8 cov_expect = info.inverse();
        Vec8 mean_expect =
            cov_expect * (pred.covariance.inverse() * pred.mean + m.H.transpose() * r.inverse() * z);
        CHECK((post.mean - mean_expect).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((post.covariance - cov_expect).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("covariance stays symmetric and PSD over 10000 random steps") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(0.1, 3.0);
    FilterState s = kf_init(Vec4(100, 100, 0.5, 30));
    const MotionModel& m = motion_model();
    int resets = 0;
    for (int step = 0; step < 10000; ++step) {
        NoiseParams n = NoiseParams::fixed(unit(rng), unit(rng));
        FilterState pred = kf_predict(s, m, n.Q);
        CHECK((pred.covariance - pred.covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
        Vec4 z = m.H * pred.mean;
        for (int i = 0; i < 4; ++i) z[i] += std::uniform_real_distribution<double>(-2, 2)(rng);
        z[2] = std::max(z[2], 0.1);
        z[3] = std::max(z[3], 1.0);
        s = kf_update(pred, z, m, n.R);
        CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
        if (step % 97 == 0) {
            CHECK(is_psd(pred.covariance));
            CHECK(is_psd(s.covariance));
        }
        if (step % 500 == 499) {
            s = kf_init(Vec4(100, 100, 0.5, 30));  // keep the state bounded
            ++resets;
        }
    }
    CHECK(resets > 0);
}

TEST_CASE("nkf_noise with zero weights emits base * ln2 diagonals") {
    std::mt19937 rng(13);
    NoiseNet net = NoiseNet::init(8, 2.0, 3.0, 1.0, rng);
    for (nn::Tensor* t : {&net.r_hidden.weight, &net.r_hidden.bias, &net.r_out.weight,
                          &net.r_out.bias, &net.q_hidden.weight, &net.q_hidden.bias,
                          &net.q_out.weight, &net.q_out.bias})
        std::fill(t->data().begin(), t->data().end(), 0.0);

    NoiseParams a = nkf_noise(net, Vec4(1, 2, 0.5, 4), Vec8::Zero());
    NoiseParams b = nkf_noise(net, Vec4(-9, 0, 2.0, 1), Vec8::Ones());
    const double ln2 = std::log(2.0);
    for (int i = 0; i < 4; ++i)
        CHECK(a.R(i, i) == doctest::Approx(3.0 * ln2 + 1e-8).epsilon(1e-12));
    for (int i = 0; i < 8; ++i)
        CHECK(a.Q(i, i) == doctest::Approx(2.0 * ln2 + 1e-8).epsilon(1e-12));
    // constant net: identical noise for different inputs
    CHECK((a.R - b.R).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.Q - b.Q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nkf_noise matches a layer-by-layer scalar re-evaluation") {
    std::mt19937 rng(15);
    NoiseNet net = NoiseNet::init(6, 1.5, 0.7, 0.01, rng);
    Vec4 z(120, 80, 0.6, 25);

    Vec4 zn = normalize_obs(z, net.input_scale);
    std::vector<double> hidden(6);
    for (int o = 0; o < 6; ++o) {
        double s = net.r_hidden.bias[o];
        for (int i = 0; i < 4; ++i) s += net.r_hidden.weight.at(o, i) * zn[i];
        hidden[o] = std::max(s, 0.0);
    }
    NoiseParams n = nkf_noise(net, z, Vec8::Zero());
    for (int o = 0; o < 4; ++o) {
        double s = net.r_out.bias[o];
        for (int i = 0; i < 6; ++i) s += net.r_out.weight.at(o, i) * hidden[i];
        double expect = 0.7 * std::log(1.0 + std::exp(s)) + 1e-8;
        CHECK(n.R(o, o) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(n.R(o, o) > 0.0);
    }
}

TEST_CASE("constant-output noise net reproduces the vanilla filter trajectory") {
    std::mt19937 rng(17);
    NoiseNet net = NoiseNet::init(8, 0.8, 1.7, 1.0, rng);
    for (nn::Tensor* t : {&net.r_hidden.weight, &net.r_hidden.bias, &net.r_out.weight,
                          &net.r_out.bias, &net.q_hidden.weight, &net.q_hidden.bias,
                          &net.q_out.weight, &net.q_out.bias})
        std::fill(t->data().begin(), t->data().end(), 0.0);

    const double ln2 = std::log(2.0);
    NoiseParams constant;
    constant.Q = (0.8 * ln2 + 1e-8) * Mat8::Identity();
    constant.R = (1.7 * ln2 + 1e-8) * Mat4::Identity();

    NkfSequence seq = line_sequence(100, 1.5, rng);
    auto nkf_states = filter_sequence(
        seq.obs, [&](const Vec4& z, const Vec8& x) { return nkf_noise(net, z, x); });
    auto vanilla_states =
        filter_sequence(seq.obs, [&](const Vec4&, const Vec8&) { return constant; });
    REQUIRE(nkf_states.size() == vanilla_states.size());
    for (size_t k = 0; k < nkf_states.size(); ++k) {
        CHECK((nkf_states[k].mean - vanilla_states[k].mean).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((nkf_states[k].covariance - vanilla_states[k].covariance).cwiseAbs().maxCoeff() <=
              1e-9);
    }
}

TEST_CASE("tape recursion loss agrees with the plain filter loss") {
    std::mt19937 rng(19);
    NoiseNet net = NoiseNet::init(8, 1.0, 1.0, 0.01, rng);
    NkfSequence seq = line_sequence(12, 2.0, rng);

    nn::Tape t;
    nn::Binder b(t);
    BoundNoiseNet bound = bind(b, net);
    nn::Var loss = nkf_sequence_loss(t, bound, seq);
    const double plain = nkf_loss(net, {seq});
    CHECK(t.value(loss)[0] == doctest::Approx(plain).epsilon(1e-9));
}

TEST_CASE("unrolled NKF gradient matches finite differences") {
    std::mt19937 rng(21);
    NoiseNet net = NoiseNet::init(4, 1.0, 1.0, 0.01, rng);
    NkfSequence seq = line_sequence(8, 1.0, rng);

    std::vector<nn::Tensor> params{net.r_hidden.weight, net.r_hidden.bias, net.r_out.weight,
                                   net.r_out.bias,      net.q_hidden.weight, net.q_hidden.bias,
                                   net.q_out.weight,    net.q_out.bias};
    testutil::check_gradients(
        params,
        [&](nn::Tape& t, const std::vector<nn::Var>& vs) {
            BoundNoiseNet bound;
            bound.r_hidden = {vs[0], vs[1], nn::Activation::Relu};
            bound.r_out = {vs[2], vs[3], nn::Activation::Identity};
            bound.q_hidden = {vs[4], vs[5], nn::Activation::Relu};
            bound.q_out = {vs[6], vs[7], nn::Activation::Identity};
            bound.base_q = net.base_q;
            bound.base_r = net.base_r;
            bound.input_scale = net.input_scale;
            return nkf_sequence_loss(t, bound, seq);
        },
        1e-4, 1e-3);
}

TEST_CASE("nkf_train reduces the training loss") {
    std::mt19937 rng(23);
    std::vector<NkfSequence> data;
    for (int i = 0; i < 8; ++i) data.push_back(line_sequence(24, 1.0 + (i % 3), rng));

    NkfTrainOptions opt;
    opt.epochs = 3;
    opt.lr = 1e-3;
    opt.hidden = 8;
    opt.input_scale = 0.01;
    opt.seed = 5;
    NkfTrainResult result = nkf_train(data, opt);
    REQUIRE(result.epoch_loss.size() == 4);
    CHECK(result.epoch_loss.back() <= result.epoch_loss.front());
}

TEST_CASE("nkf_train skips short sequences and rejects empty datasets") {
    std::mt19937 rng(25);
    NkfSequence tiny;
    tiny.obs.push_back(Vec4(0, 0, 0.5, 4));
    tiny.gt.push_back(Vec4(0, 0, 0.5, 4));

    NkfTrainOptions opt;
    opt.epochs = 1;
    opt.hidden = 4;
    CHECK_THROWS_AS(nkf_train({tiny}, opt), DataError);

    std::vector<NkfSequence> mixed{tiny, line_sequence(6, 0.5, rng)};
    NkfTrainResult result = nkf_train(mixed, opt);  // short one skipped with a warning
    CHECK(result.epoch_loss.size() == 2);
}

TEST_CASE("noise net save/load round-trip") {
    testutil::TempDir tmp("kalman");
    std::mt19937 rng(27);
    NoiseNet net = NoiseNet::init(16, 0.4, 2.5, 0.005, rng);
    auto file = tmp / "nkf.json";
    net.save(file);
    NoiseNet back = NoiseNet::load(file);
    CHECK(back.base_q == net.base_q);
    CHECK(back.base_r == net.base_r);
    CHECK(back.input_scale == net.input_scale);
    CHECK(back.hidden_width() == 16);
    Vec4 z(77, 33, 0.4, 12);
    Vec8 x = Vec8::Ones() * 3.0;
    NoiseParams a = nkf_noise(net, z, x);
    NoiseParams b = nkf_noise(back, z, x);
    CHECK((a.R - b.R).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.Q - b.Q).cwiseAbs().maxCoeff() == 0.0);
}
