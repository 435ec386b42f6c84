#pragma once

#include <string>
#include <vector>

#include <trackref/nn/tape.hpp>
#include <trackref/nn/tensor.hpp>

namespace trackref::nn {

enum class Activation { Identity, Relu, Sigmoid, Softplus };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

// Fully connected layer y = act(x W^T + b) applied along the trailing
// dimension; weight is [out, in], bias [out].
struct DenseLayer {
    Tensor weight;
    Tensor bias;
    Activation act = Activation::Identity;

    static DenseLayer init(int in, int out, Activation act, std::mt19937& rng);

    int in_dim() const { return weight.cols(); }
    int out_dim() const { return weight.rows(); }

    // Plain evaluation for inference paths; x is [in] or [n, in].
    Tensor forward(const Tensor& x) const;
};

// Single-head scaled dot-product cross attention projections.
// wq, wk, wv are [head_dim, C]; wo is [C, head_dim].
struct AttentionParams {
    Tensor wq, wk, wv, wo;
    int head_dim = 0;

    static AttentionParams init(int channels, int head_dim, std::mt19937& rng);
};

// Named handle used to bind model parameters onto a tape for one training
// step and to enumerate them for the optimizer and the weights file.
struct ParamRef {
    std::string name;
    Tensor* tensor = nullptr;
};

// Binds parameters as tape leaves and remembers the (tensor, var) pairing
// so gradients can be applied back after backward().
class Binder {
public:
    explicit Binder(Tape& tape) : tape_(&tape) {}

    Var bind(Tensor& t) {
        Var v = tape_->leaf(t);
        bound_.push_back({&t, v});
        return v;
    }
    Var bind_frozen(const Tensor& t) { return tape_->leaf(t); }

    const std::vector<std::pair<Tensor*, Var>>& bound() const { return bound_; }
    Tape& tape() { return *tape_; }

private:
    Tape* tape_;
    std::vector<std::pair<Tensor*, Var>> bound_;
};

struct BoundDense {
    Var weight, bias;
    Activation act = Activation::Identity;
};

BoundDense bind(Binder& b, DenseLayer& layer);
BoundDense bind_frozen(Binder& b, const DenseLayer& layer);

struct BoundAttention {
    Var wq, wk, wv, wo;
    int head_dim = 0;
};

BoundAttention bind(Binder& b, AttentionParams& p);

// y = act(x W^T + b); x is [n, in] (rank-1 inputs are treated as one row).
Var dense_forward(Tape& t, const BoundDense& layer, Var x);

// softmax((q Wq)(kv Wk)^T / sqrt(head_dim)) (kv Wv) Wo; q is [Nq, C],
// kv is [Nk, C], result [Nq, C]. Nk = 0 cannot be represented by Tensor,
// so the empty-context error surfaces as a shape error upstream.
Var cross_attention(Tape& t, const BoundAttention& p, Var q, Var kv);

// Stable softmax with multiplicative temperature, plain-tensor version.
Tensor softmax(const Tensor& x, double temperature = 1.0);

// Cosine-annealed learning rate: lr0 * (1 + cos(pi * step / total)) / 2.
double cosine_lr(int step_index, int total_steps, double lr0);

// One SGD step: p -= lr(step) * g for every (param, grad) pair.
void sgd_cosine_step(const std::vector<std::pair<Tensor*, Var>>& bound, const Tape& tape,
                     int step_index, int total_steps, double lr0, double momentum = 0.0,
                     std::vector<Tensor>* velocity = nullptr);

}  // namespace trackref::nn
