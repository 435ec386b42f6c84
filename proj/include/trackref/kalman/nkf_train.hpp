#pragma once

#include <functional>
#include <vector>

#include <trackref/kalman/noise_net.hpp>

namespace trackref::kalman {

// One training sequence: noisy observations paired with ground-truth boxes,
// both in center form (cx, cy, aspect, h), one entry per consecutive frame.
struct NkfSequence {
    std::vector<Vec4> obs;
    std::vector<Vec4> gt;
};

struct NkfTrainOptions {
    int epochs = 10;
    double lr = 1e-5;
    double momentum = 0.0;
    int hidden = 32;
    double base_q = 1.0;
    double base_r = 1.0;
    double input_scale = 1.0;
    // Backprop-through-time cap; longer sequences are split into chunks.
    int max_unroll = 64;
    unsigned seed = 1;
};

struct NkfTrainResult {
    NoiseNet net;
    // [0] is the dataset loss of the initial net, [k] after epoch k.
    std::vector<double> epoch_loss;
};

using NoiseFn = std::function<NoiseParams(const Vec4& z, const Vec8& x_prev)>;

// Runs init/predict/update over the observations with per-step noise from
// `noise`; returns the posterior state per frame (index 0 = birth state).
std::vector<FilterState> filter_sequence(const std::vector<Vec4>& obs, const NoiseFn& noise);

// Mean over sequences and update frames (k >= 1) of |H mean_k - gt_k|^2.
double filter_loss(const std::vector<NkfSequence>& data, const NoiseFn& noise);
double nkf_loss(const NoiseNet& net, const std::vector<NkfSequence>& data);
double fixed_noise_loss(double base_q, double base_r, const std::vector<NkfSequence>& data);

// Network parameters bound onto a tape for one unrolled training step.
struct BoundNoiseNet {
    nn::BoundDense r_hidden, r_out, q_hidden, q_out;
    double base_q = 1.0;
    double base_r = 1.0;
    double input_scale = 1.0;
};

BoundNoiseNet bind(nn::Binder& b, NoiseNet& net);

// Builds the filter recursion on the tape and returns the per-sequence loss
// node (mean over update frames of the squared observation-space error).
nn::Var nkf_sequence_loss(nn::Tape& t, const BoundNoiseNet& net, const NkfSequence& seq);

// SGD with cosine-annealed lr, one step per (sequence chunk); sequences
// shorter than 2 frames are skipped with a warning.
NkfTrainResult nkf_train(const std::vector<NkfSequence>& data, const NkfTrainOptions& opt);

// 5x5 log-spaced grid search over fixed (base_q, base_r); returns the best
// (base_q, base_r, loss) triple. Used as the vanilla-filter reference.
struct GridResult {
    double base_q = 0.0;
    double base_r = 0.0;
    double loss = 0.0;
};
GridResult best_fixed_noise(const std::vector<NkfSequence>& data,
                            const std::vector<double>& q_grid,
                            const std::vector<double>& r_grid);

}  // namespace trackref::kalman
