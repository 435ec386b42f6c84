#pragma once

#include <functional>
#include <span>
#include <vector>

#include <trackref/nn/tensor.hpp>

namespace trackref::nn {

class Tape;

// Handle to a node on a tape. Cheap to copy; only valid for the tape that
// created it.
struct Var {
    int id = -1;
};

// Reverse-mode autodiff over an explicit tape. Nodes are created eagerly
// with their forward values; backward() replays the tape in reverse and
// accumulates gradients into every node. First-order only.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var leaf(Tensor value);

    const Tensor& value(Var v) const { return nodes_[v.id].value; }
    const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
    size_t node_count() const { return nodes_.size(); }

    // Seeds d(loss)/d(loss) = 1 and propagates. Loss must be a scalar.
    void backward(Var loss);

    // --- elementwise / scalar ---
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b);
    Var scale(Var a, double c);
    Var add_const(Var a, double c);
    Var relu(Var a);
    Var sigmoid(Var a);
    Var softplus(Var a);
    Var exp(Var a);
    Var log(Var a);
    Var sqrt(Var a);
    Var pow_const(Var a, double p);
    Var clamp(Var a, double lo, double hi);

    // --- linear algebra ---
    Var matmul(Var a, Var b);       // [n,k] x [k,m]
    Var transpose(Var a);           // [n,m] -> [m,n]
    Var add_rowvec(Var a, Var b);   // [n,c] + [c], row broadcast
    Var mul_rowvec(Var a, Var b);   // [n,c] * [c], row broadcast
    Var diag(Var a);                // [n] -> [n,n]
    Var inverse_psd(Var a);         // Cholesky inverse, jitter 1e-9 on failure

    // --- shape / reduction ---
    Var reshape(Var a, std::vector<int> shape);
    Var sum(Var a);                          // -> scalar
    Var mean(Var a);                         // -> scalar
    Var mean_rows(Var a);                    // [n,c] -> [c]
    Var stack_rows(std::span<const Var> xs); // k vectors [c] -> [k,c]
    Var softmax_rows(Var a, double temperature = 1.0);

    // cosine(a, b) of two vectors as a scalar node
    Var cosine(Var a, Var b);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void()> backprop;  // empty for leaves
    };

    Var push(Tensor value, std::function<void()> backprop);
    Tensor& grad_ref(Var v) { return nodes_[v.id].grad; }

    std::vector<Node> nodes_;
};

}  // namespace trackref::nn
