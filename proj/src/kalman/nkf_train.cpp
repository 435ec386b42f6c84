#include <trackref/kalman/nkf_train.hpp>

#include <algorithm>
#include <iostream>
#include <numeric>

#include <trackref/core/errors.hpp>

namespace trackref::kalman {

std::vector<FilterState> filter_sequence(const std::vector<Vec4>& obs, const NoiseFn& noise) {
    if (obs.empty())
        throw DataError("filter_sequence: no observations");
    const MotionModel& m = motion_model();
    std::vector<FilterState> states;
    states.reserve(obs.size());
    states.push_back(kf_init(obs[0]));
    for (size_t k = 1; k < obs.size(); ++k) {
        NoiseParams n = noise(obs[k], states.back().mean);
        FilterState pred = kf_predict(states.back(), m, n.Q);
        states.push_back(kf_update(pred, obs[k], m, n.R));
    }
    return states;
}

double filter_loss(const std::vector<NkfSequence>& data, const NoiseFn& noise) {
    double total = 0.0;
    size_t count = 0;
    for (const NkfSequence& seq : data) {
        if (seq.obs.size() < 2) continue;
        auto states = filter_sequence(seq.obs, noise);
        for (size_t k = 1; k < states.size(); ++k) {
            const Vec4 err = states[k].mean.head<4>() - seq.gt[k];
            total += err.squaredNorm();
        }
        count += states.size() - 1;
    }
    if (count == 0)
        throw DataError("filter_loss: no usable sequences");
    return total / static_cast<double>(count);
}

double nkf_loss(const NoiseNet& net, const std::vector<NkfSequence>& data) {
    return filter_loss(data, [&net](const Vec4& z, const Vec8& x) { return nkf_noise(net, z, x); });
}

double fixed_noise_loss(double base_q, double base_r, const std::vector<NkfSequence>& data) {
    const NoiseParams n = NoiseParams::fixed(base_q, base_r);
    return filter_loss(data, [&n](const Vec4&, const Vec8&) { return n; });
}

BoundNoiseNet bind(nn::Binder& b, NoiseNet& net) {
    return BoundNoiseNet{bind(b, net.r_hidden), bind(b, net.r_out),
                         bind(b, net.q_hidden), bind(b, net.q_out),
                         net.base_q, net.base_r, net.input_scale};
}

namespace {

using nn::Tape;
using nn::Tensor;
using nn::Var;

Tensor col_vec(const Vec4& v) { return Tensor({4, 1}, {v[0], v[1], v[2], v[3]}); }

Tensor row_vec(const Vec4& v) { return Tensor({1, 4}, {v[0], v[1], v[2], v[3]}); }

Tensor to_tensor(const Mat8& m) {
    Tensor t({8, 8});
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) t.at(r, c) = m(r, c);
    return t;
}

Tensor to_tensor(const Mat48& m) {
    Tensor t({4, 8});
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 8; ++c) t.at(r, c) = m(r, c);
    return t;
}

// softplus(net(x)) * base + 1e-8 as a diagonal matrix node
Var noise_diag(Tape& t, const nn::BoundDense& hidden, const nn::BoundDense& out, Var x_row,
               double base) {
    Var raw = dense_forward(t, out, dense_forward(t, hidden, x_row));
    Var d = t.add_const(t.scale(t.softplus(raw), base), 1e-8);
    return t.diag(t.reshape(d, {t.value(d).size()}));
}

}  // namespace

Var nkf_sequence_loss(Tape& t, const BoundNoiseNet& net, const NkfSequence& seq) {
    if (seq.obs.size() < 2)
        throw DataError("nkf_sequence_loss: sequence needs at least 2 observations");
    if (seq.obs.size() != seq.gt.size())
        throw DataError("nkf_sequence_loss: observation/ground-truth length mismatch");
    const MotionModel& m = motion_model();
    const Var F = t.leaf(to_tensor(m.F));
    const Var Ft = t.transpose(F);
    const Var H = t.leaf(to_tensor(m.H));
    const Var Ht = t.transpose(H);
    const Var I8 = t.leaf(Tensor::identity(8));

    const double s = net.input_scale;
    const Tensor state_scales({1, 8}, {s, s, 1.0, s, s, s, 1.0, s});
    const Var state_scale_row = t.leaf(state_scales);

    FilterState init = kf_init(seq.obs[0]);
    Var mean = t.leaf(Tensor({8, 1}, std::vector<double>(init.mean.data(), init.mean.data() + 8)));
    Var cov = t.leaf(to_tensor(init.covariance));

    Var loss = t.leaf(Tensor::scalar(0.0));
    for (size_t k = 1; k < seq.obs.size(); ++k) {
        // process noise from the previous state mean
        Var q_in = t.mul(t.reshape(mean, {1, 8}), state_scale_row);
        Var Q = noise_diag(t, net.q_hidden, net.q_out, q_in, net.base_q);
        Var mean_pred = t.matmul(F, mean);
        Var cov_pred = t.add(t.matmul(t.matmul(F, cov), Ft), Q);
        cov_pred = t.scale(t.add(cov_pred, t.transpose(cov_pred)), 0.5);

        // observation noise from the current observation
        Var r_in = t.leaf(row_vec(normalize_obs(seq.obs[k], s)));
        Var R = noise_diag(t, net.r_hidden, net.r_out, r_in, net.base_r);
        Var S = t.add(t.matmul(t.matmul(H, cov_pred), Ht), R);
        Var K = t.matmul(t.matmul(cov_pred, Ht), t.inverse_psd(S));

        Var z = t.leaf(col_vec(seq.obs[k]));
        Var innovation = t.sub(z, t.matmul(H, mean_pred));
        mean = t.add(mean_pred, t.matmul(K, innovation));
        Var cov_new = t.matmul(t.sub(I8, t.matmul(K, H)), cov_pred);
        cov = t.scale(t.add(cov_new, t.transpose(cov_new)), 0.5);

        Var err = t.sub(t.matmul(H, mean), t.leaf(col_vec(seq.gt[k])));
        loss = t.add(loss, t.sum(t.mul(err, err)));
    }
    return t.scale(loss, 1.0 / static_cast<double>(seq.obs.size() - 1));
}

NkfTrainResult nkf_train(const std::vector<NkfSequence>& data, const NkfTrainOptions& opt) {
    // split long sequences into backprop chunks, drop unusable ones
    std::vector<NkfSequence> chunks;
    size_t skipped = 0;
    for (const NkfSequence& seq : data) {
        if (seq.obs.size() != seq.gt.size())
            throw DataError("nkf_train: observation/ground-truth length mismatch");
        if (seq.obs.size() < 2) {
            ++skipped;
            continue;
        }
        for (size_t start = 0; start + 1 < seq.obs.size();
             start += static_cast<size_t>(opt.max_unroll)) {
            const size_t stop = std::min(seq.obs.size(), start + opt.max_unroll);
            if (stop - start < 2) break;
            NkfSequence chunk;
            chunk.obs.assign(seq.obs.begin() + start, seq.obs.begin() + stop);
            chunk.gt.assign(seq.gt.begin() + start, seq.gt.begin() + stop);
            chunks.push_back(std::move(chunk));
        }
    }
    if (skipped > 0)
        std::cerr << "nkf_train: skipped " << skipped << " sequence(s) shorter than 2 frames\n";
    if (chunks.empty())
        throw DataError("nkf_train: no usable training sequences");

    std::mt19937 rng(opt.seed);
    NkfTrainResult result;
    result.net = NoiseNet::init(opt.hidden, opt.base_q, opt.base_r, opt.input_scale, rng);
    result.epoch_loss.push_back(nkf_loss(result.net, chunks));

    const int total_steps = opt.epochs * static_cast<int>(chunks.size());
    int step = 0;
    std::vector<nn::Tensor> velocity;
    std::vector<size_t> order(chunks.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t idx : order) {
            nn::Tape t;
            nn::Binder b(t);
            BoundNoiseNet bound = bind(b, result.net);
            Var loss = nkf_sequence_loss(t, bound, chunks[idx]);
            t.backward(loss);
            nn::sgd_cosine_step(b.bound(), t, step, total_steps, opt.lr, opt.momentum, &velocity);
            ++step;
        }
        result.epoch_loss.push_back(nkf_loss(result.net, chunks));
    }
    return result;
}

GridResult best_fixed_noise(const std::vector<NkfSequence>& data,
                            const std::vector<double>& q_grid,
                            const std::vector<double>& r_grid) {
    GridResult best;
    best.loss = std::numeric_limits<double>::infinity();
    for (double q : q_grid)
        for (double r : r_grid) {
            const double loss = fixed_noise_loss(q, r, data);
            if (loss < best.loss) best = GridResult{q, r, loss};
        }
    return best;
}

}  // namespace trackref::kalman
