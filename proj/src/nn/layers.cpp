#include <trackref/nn/layers.hpp>

#include <cmath>
#include <numbers>

#include <trackref/core/errors.hpp>

namespace trackref::nn {

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "softplus") return Activation::Softplus;
    throw ConfigError("unknown activation '" + name + "'");
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Softplus: return "softplus";
    }
    return "identity";
}

DenseLayer DenseLayer::init(int in, int out, Activation act, std::mt19937& rng) {
    DenseLayer l;
    l.weight = uniform_init({out, in}, in, rng);
    l.bias = uniform_init({out}, in, rng);
    l.act = act;
    return l;
}

namespace {

double apply_act(Activation act, double x) {
    switch (act) {
        case Activation::Identity: return x;
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::Softplus:
            return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    }
    return x;
}

}  // namespace

Tensor DenseLayer::forward(const Tensor& x) const {
    const bool vec = x.rank() == 1;
    const int n = vec ? 1 : x.rows();
    const int in = vec ? x.size() : x.cols();
    if (in != in_dim())
        throw DataError("dense forward: input dim " + std::to_string(in) + " != " +
                        std::to_string(in_dim()));
    Tensor y = vec ? Tensor({out_dim()}) : Tensor({n, out_dim()});
    for (int r = 0; r < n; ++r) {
        const double* xr = x.data().data() + static_cast<size_t>(r) * in;
        double* yr = y.data().data() + static_cast<size_t>(r) * out_dim();
        for (int o = 0; o < out_dim(); ++o) {
            double s = bias[o];
            const double* wo = weight.data().data() + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) s += wo[i] * xr[i];
            yr[o] = apply_act(act, s);
        }
    }
    return y;
}

AttentionParams AttentionParams::init(int channels, int head_dim, std::mt19937& rng) {
    AttentionParams p;
    p.wq = uniform_init({head_dim, channels}, channels, rng);
    p.wk = uniform_init({head_dim, channels}, channels, rng);
    p.wv = uniform_init({head_dim, channels}, channels, rng);
    p.wo = uniform_init({channels, head_dim}, head_dim, rng);
    p.head_dim = head_dim;
    return p;
}

BoundDense bind(Binder& b, DenseLayer& layer) {
    return BoundDense{b.bind(layer.weight), b.bind(layer.bias), layer.act};
}

BoundDense bind_frozen(Binder& b, const DenseLayer& layer) {
    return BoundDense{b.bind_frozen(layer.weight), b.bind_frozen(layer.bias), layer.act};
}

BoundAttention bind(Binder& b, AttentionParams& p) {
    return BoundAttention{b.bind(p.wq), b.bind(p.wk), b.bind(p.wv), b.bind(p.wo), p.head_dim};
}

Var dense_forward(Tape& t, const BoundDense& layer, Var x) {
    const bool vec = t.value(x).rank() == 1;
    Var rows = vec ? t.reshape(x, {1, t.value(x).size()}) : x;
    Var y = t.add_rowvec(t.matmul(rows, t.transpose(layer.weight)), layer.bias);
    switch (layer.act) {
        case Activation::Identity: break;
        case Activation::Relu: y = t.relu(y); break;
        case Activation::Sigmoid: y = t.sigmoid(y); break;
        case Activation::Softplus: y = t.softplus(y); break;
    }
    return vec ? t.reshape(y, {t.value(y).cols()}) : y;
}

Var cross_attention(Tape& t, const BoundAttention& p, Var q, Var kv) {
    Var qp = t.matmul(q, t.transpose(p.wq));    // [Nq, d]
    Var kp = t.matmul(kv, t.transpose(p.wk));   // [Nk, d]
    Var vp = t.matmul(kv, t.transpose(p.wv));   // [Nk, d]
    Var scores = t.matmul(qp, t.transpose(kp)); // [Nq, Nk]
    Var attn = t.softmax_rows(scores, 1.0 / std::sqrt(static_cast<double>(p.head_dim)));
    return t.matmul(t.matmul(attn, vp), t.transpose(p.wo));
}

Tensor softmax(const Tensor& x, double temperature) {
    if (temperature <= 0.0)
        throw DataError("softmax: temperature must be positive");
    if (x.size() < 1)
        throw DataError("softmax: empty input");
    Tensor y = x;
    double mx = y[0];
    for (int i = 1; i < y.size(); ++i) mx = std::max(mx, y[i]);
    double z = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        y[i] = std::exp(temperature * (y[i] - mx));
        z += y[i];
    }
    for (int i = 0; i < y.size(); ++i) y[i] /= z;
    return y;
}

double cosine_lr(int step_index, int total_steps, double lr0) {
    if (lr0 <= 0.0)
        throw ConfigError("lr0 must be positive");
    if (step_index < 0 || step_index >= total_steps)
        throw ConfigError("step index out of range");
    const double phase = std::numbers::pi * static_cast<double>(step_index) / total_steps;
    return lr0 * (1.0 + std::cos(phase)) / 2.0;
}

void sgd_cosine_step(const std::vector<std::pair<Tensor*, Var>>& bound, const Tape& tape,
                     int step_index, int total_steps, double lr0, double momentum,
                     std::vector<Tensor>* velocity) {
    const double lr = cosine_lr(step_index, total_steps, lr0);
    if (momentum != 0.0 && velocity) {
        if (velocity->empty())
            for (const auto& [param, var] : bound)
                velocity->push_back(Tensor::zeros(param->shape()));
        for (size_t i = 0; i < bound.size(); ++i) {
            auto& [param, var] = bound[i];
            const Tensor& g = tape.grad(var);
            Tensor& v = (*velocity)[i];
            for (int j = 0; j < param->size(); ++j) {
                v[j] = momentum * v[j] + g[j];
                (*param)[j] -= lr * v[j];
            }
        }
        return;
    }
    for (const auto& [param, var] : bound) {
        const Tensor& g = tape.grad(var);
        for (int j = 0; j < param->size(); ++j) (*param)[j] -= lr * g[j];
    }
}

}  // namespace trackref::nn
