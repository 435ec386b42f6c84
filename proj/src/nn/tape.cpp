#include <trackref/nn/tape.hpp>

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <trackref/core/errors.hpp>

namespace trackref::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

CMapMat as_mat(const Tensor& t) {
    if (t.rank() != 2)
        throw DataError("expected rank-2 tensor, got " + t.shape_str());
    return CMapMat(t.data().data(), t.rows(), t.cols());
}

MapMat as_mat(Tensor& t) {
    return MapMat(t.data().data(), t.rows(), t.rank() == 2 ? t.cols() : 1);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw DataError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                        b.shape_str());
}

double stable_softplus(double x) {
    // log(1 + e^x) without overflow for large |x|
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

Var Tape::push(Tensor value, std::function<void()> backprop) {
    Node node;
    node.grad = Tensor::zeros(value.shape());
    node.value = std::move(value);
    node.backprop = std::move(backprop);
    nodes_.push_back(std::move(node));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Tensor value) { return push(std::move(value), nullptr); }

void Tape::backward(Var loss) {
    if (value(loss).size() != 1)
        throw DataError("backward: loss must be scalar, got " + value(loss).shape_str());
    for (Node& n : nodes_)
        std::fill(n.grad.data().begin(), n.grad.data().end(), 0.0);
    nodes_[loss.id].grad[0] = 1.0;
    for (int i = loss.id; i >= 0; --i)
        if (nodes_[i].backprop) nodes_[i].backprop();
}

// ---------------------------------------------------------------- elementwise

Var Tape::add(Var a, Var b) {
    check_same_shape(value(a), value(b), "add");
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] += value(b)[i];
    return push(std::move(out), [this, a, b, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int i = 0; i < g.size(); ++i) {
            grad_ref(a)[i] += g[i];
            grad_ref(b)[i] += g[i];
        }
    });
}

Var Tape::sub(Var a, Var b) {
    check_same_shape(value(a), value(b), "sub");
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] -= value(b)[i];
    return push(std::move(out), [this, a, b, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int i = 0; i < g.size(); ++i) {
            grad_ref(a)[i] += g[i];
            grad_ref(b)[i] -= g[i];
        }
    });
}

Var Tape::mul(Var a, Var b) {
    check_same_shape(value(a), value(b), "mul");
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] *= value(b)[i];
    return push(std::move(out), [this, a, b, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int i = 0; i < g.size(); ++i) {
            grad_ref(a)[i] += g[i] * value(b)[i];
            grad_ref(b)[i] += g[i] * value(a)[i];
        }
    });
}

Var Tape::div(Var a, Var b) {
    check_same_shape(value(a), value(b), "div");
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] /= value(b)[i];
    return push(std::move(out), [this, a, b, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int i = 0; i < g.size(); ++i) {
            const double bi = value(b)[i];
            grad_ref(a)[i] += g[i] / bi;
            grad_ref(b)[i] -= g[i] * value(a)[i] / (bi * bi);
        }
    });
}

Var Tape::scale(Var a, double c) {
    Tensor out = value(a);
    for (double& v : out.data()) v *= c;
    return push(std::move(out), [this, a, c, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int i = 0; i < g.size(); ++i) grad_ref(a)[i] += g[i] * c;
    });
}

Var Tape::add_const(Var a, double c) {
    Tensor out = value(a);
    for (double& v : out.data()) v += c;
    return push(std::move(out), [this, a, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int i = 0; i < g.size(); ++i) grad_ref(a)[i] += g[i];
    });
}

namespace {
template <class F, class DF>
std::pair<Tensor, Tensor> map_unary(const Tensor& x, F f, DF df) {
    Tensor out = x, deriv = x;
    for (int i = 0; i < x.size(); ++i) {
        out[i] = f(x[i]);
        deriv[i] = df(x[i], out[i]);
    }
    return {std::move(out), std::move(deriv)};
}
}  // namespace

#define TRACKREF_UNARY_OP(name, f, df)                                              \
    Var Tape::name(Var a) {                                                         \
        auto [out, deriv] = map_unary(                                              \
            value(a), [](double x) { return f; },                                   \
            [](double x, double y) { (void)x; (void)y; return df; });               \
        return push(std::move(out), [this, a, d = std::move(deriv),                 \
                                     id = static_cast<int>(nodes_.size())] {        \
            const Tensor& g = nodes_[id].grad;                                      \
            for (int i = 0; i < g.size(); ++i) grad_ref(a)[i] += g[i] * d[i];       \
        });                                                                         \
    }

TRACKREF_UNARY_OP(relu, x > 0.0 ? x : 0.0, x > 0.0 ? 1.0 : 0.0)
TRACKREF_UNARY_OP(sigmoid, 1.0 / (1.0 + std::exp(-x)), y*(1.0 - y))
TRACKREF_UNARY_OP(softplus, stable_softplus(x), 1.0 / (1.0 + std::exp(-x)))
TRACKREF_UNARY_OP(exp, std::exp(x), y)
TRACKREF_UNARY_OP(log, std::log(x), 1.0 / x)
TRACKREF_UNARY_OP(sqrt, std::sqrt(x), 0.5 / y)

#undef TRACKREF_UNARY_OP

Var Tape::pow_const(Var a, double p) {
    auto [out, deriv] = map_unary(
        value(a), [p](double x) { return std::pow(x, p); },
        [p](double x, double y) { return x != 0.0 ? p * y / x : 0.0; });
    return push(std::move(out),
                [this, a, d = std::move(deriv), id = static_cast<int>(nodes_.size())] {
                    const Tensor& g = nodes_[id].grad;
                    for (int i = 0; i < g.size(); ++i) grad_ref(a)[i] += g[i] * d[i];
                });
}

Var Tape::clamp(Var a, double lo, double hi) {
    auto [out, deriv] = map_unary(
        value(a), [lo, hi](double x) { return std::clamp(x, lo, hi); },
        [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
    return push(std::move(out),
                [this, a, d = std::move(deriv), id = static_cast<int>(nodes_.size())] {
                    const Tensor& g = nodes_[id].grad;
                    for (int i = 0; i < g.size(); ++i) grad_ref(a)[i] += g[i] * d[i];
                });
}

// ------------------------------------------------------------- linear algebra

Var Tape::matmul(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.rank() != 2 || tb.rank() != 2 || ta.cols() != tb.rows())
        throw DataError("matmul: incompatible shapes " + ta.shape_str() + " x " + tb.shape_str());
    Tensor out({ta.rows(), tb.cols()});
    as_mat(out) = as_mat(ta) * as_mat(tb);
    return push(std::move(out), [this, a, b, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        CMapMat G(g.data().data(), g.rows(), g.cols());
        as_mat(grad_ref(a)) += G * as_mat(value(b)).transpose();
        as_mat(grad_ref(b)) += as_mat(value(a)).transpose() * G;
    });
}

Var Tape::transpose(Var a) {
    const Tensor& ta = value(a);
    if (ta.rank() != 2)
        throw DataError("transpose: expected rank-2 tensor");
    Tensor out({ta.cols(), ta.rows()});
    as_mat(out) = as_mat(ta).transpose();
    return push(std::move(out), [this, a, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        CMapMat G(g.data().data(), g.rows(), g.cols());
        as_mat(grad_ref(a)) += G.transpose();
    });
}

Var Tape::add_rowvec(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.rank() != 2 || tb.rank() != 1 || ta.cols() != tb.rows())
        throw DataError("add_rowvec: shape mismatch " + ta.shape_str() + " + " + tb.shape_str());
    Tensor out = ta;
    for (int r = 0; r < ta.rows(); ++r)
        for (int c = 0; c < ta.cols(); ++c) out.at(r, c) += tb[c];
    return push(std::move(out), [this, a, b, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int r = 0; r < g.rows(); ++r)
            for (int c = 0; c < g.cols(); ++c) {
                grad_ref(a).at(r, c) += g.at(r, c);
                grad_ref(b)[c] += g.at(r, c);
            }
    });
}

Var Tape::mul_rowvec(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.rank() != 2 || tb.rank() != 1 || ta.cols() != tb.rows())
        throw DataError("mul_rowvec: shape mismatch " + ta.shape_str() + " * " + tb.shape_str());
    Tensor out = ta;
    for (int r = 0; r < ta.rows(); ++r)
        for (int c = 0; c < ta.cols(); ++c) out.at(r, c) *= tb[c];
    return push(std::move(out), [this, a, b, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int r = 0; r < g.rows(); ++r)
            for (int c = 0; c < g.cols(); ++c) {
                grad_ref(a).at(r, c) += g.at(r, c) * value(b)[c];
                grad_ref(b)[c] += g.at(r, c) * value(a).at(r, c);
            }
    });
}

Var Tape::diag(Var a) {
    const Tensor& ta = value(a);
    if (ta.rank() != 1)
        throw DataError("diag: expected rank-1 tensor");
    const int n = ta.rows();
    Tensor out({n, n});
    for (int i = 0; i < n; ++i) out.at(i, i) = ta[i];
    return push(std::move(out), [this, a, n, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int i = 0; i < n; ++i) grad_ref(a)[i] += g.at(i, i);
    });
}

Var Tape::inverse_psd(Var a) {
    const Tensor& ta = value(a);
    if (ta.rank() != 2 || ta.rows() != ta.cols())
        throw DataError("inverse_psd: expected square matrix");
    const int n = ta.rows();
    Eigen::MatrixXd A = as_mat(ta);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    double jitter = 1e-9;
    int attempts = 0;
    while (llt.info() != Eigen::Success && attempts < 8) {
        A.diagonal().array() += jitter;
        llt.compute(A);
        jitter *= 10.0;
        ++attempts;
    }
    if (llt.info() != Eigen::Success)
        throw NumericError("inverse_psd: Cholesky failed despite jitter; diagonal min " +
                           std::to_string(A.diagonal().minCoeff()));
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Tensor out({n, n});
    as_mat(out) = inv;
    return push(std::move(out), [this, a, id = static_cast<int>(nodes_.size())] {
        // d(A^-1) = -A^-1 dA A^-1  =>  dL/dA = -Y^T G Y^T with Y = A^-1
        const Tensor& g = nodes_[id].grad;
        const Tensor& y = nodes_[id].value;
        CMapMat G(g.data().data(), g.rows(), g.cols());
        CMapMat Y(y.data().data(), y.rows(), y.cols());
        as_mat(grad_ref(a)) -= Y.transpose() * G * Y.transpose();
    });
}

// ------------------------------------------------------------ shape/reduction

Var Tape::reshape(Var a, std::vector<int> shape) {
    Tensor out(std::move(shape), value(a).data());
    return push(std::move(out), [this, a, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int i = 0; i < g.size(); ++i) grad_ref(a)[i] += g[i];
    });
}

Var Tape::sum(Var a) {
    double s = 0.0;
    for (double v : value(a).data()) s += v;
    return push(Tensor::scalar(s), [this, a, id = static_cast<int>(nodes_.size())] {
        const double g = nodes_[id].grad[0];
        for (int i = 0; i < value(a).size(); ++i) grad_ref(a)[i] += g;
    });
}

Var Tape::mean(Var a) {
    const int n = value(a).size();
    double s = 0.0;
    for (double v : value(a).data()) s += v;
    return push(Tensor::scalar(s / n), [this, a, n, id = static_cast<int>(nodes_.size())] {
        const double g = nodes_[id].grad[0] / n;
        for (int i = 0; i < n; ++i) grad_ref(a)[i] += g;
    });
}

Var Tape::mean_rows(Var a) {
    const Tensor& ta = value(a);
    if (ta.rank() != 2)
        throw DataError("mean_rows: expected rank-2 tensor");
    const int n = ta.rows(), c = ta.cols();
    Tensor out({c});
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < c; ++j) out[j] += ta.at(r, j) / n;
    return push(std::move(out), [this, a, n, c, id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < c; ++j) grad_ref(a).at(r, j) += g[j] / n;
    });
}

Var Tape::stack_rows(std::span<const Var> xs) {
    if (xs.empty())
        throw DataError("stack_rows: empty input");
    const int c = value(xs[0]).size();
    Tensor out({static_cast<int>(xs.size()), c});
    for (size_t r = 0; r < xs.size(); ++r) {
        const Tensor& row = value(xs[r]);
        if (row.size() != c)
            throw DataError("stack_rows: inconsistent row sizes");
        for (int j = 0; j < c; ++j) out.at(static_cast<int>(r), j) = row[j];
    }
    std::vector<Var> in(xs.begin(), xs.end());
    return push(std::move(out), [this, in = std::move(in), c,
                                 id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        for (size_t r = 0; r < in.size(); ++r)
            for (int j = 0; j < c; ++j) grad_ref(in[r])[j] += g.at(static_cast<int>(r), j);
    });
}

Var Tape::softmax_rows(Var a, double temperature) {
    if (temperature <= 0.0)
        throw DataError("softmax: temperature must be positive");
    const Tensor& ta = value(a);
    const int rows = ta.rank() == 2 ? ta.rows() : 1;
    const int cols = ta.rank() == 2 ? ta.cols() : ta.size();
    Tensor out = ta;
    for (int r = 0; r < rows; ++r) {
        double* row = out.data().data() + static_cast<size_t>(r) * cols;
        double mx = row[0];
        for (int j = 1; j < cols; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int j = 0; j < cols; ++j) {
            row[j] = std::exp(temperature * (row[j] - mx));
            z += row[j];
        }
        for (int j = 0; j < cols; ++j) row[j] /= z;
    }
    return push(std::move(out), [this, a, rows, cols, temperature,
                                 id = static_cast<int>(nodes_.size())] {
        const Tensor& g = nodes_[id].grad;
        const Tensor& y = nodes_[id].value;
        for (int r = 0; r < rows; ++r) {
            const double* yr = y.data().data() + static_cast<size_t>(r) * cols;
            const double* gr = g.data().data() + static_cast<size_t>(r) * cols;
            double dot = 0.0;
            for (int j = 0; j < cols; ++j) dot += gr[j] * yr[j];
            double* out_g = grad_ref(a).data().data() + static_cast<size_t>(r) * cols;
            for (int j = 0; j < cols; ++j) out_g[j] += temperature * yr[j] * (gr[j] - dot);
        }
    });
}

Var Tape::cosine(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.size() != tb.size())
        throw DataError("cosine: size mismatch");
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (int i = 0; i < ta.size(); ++i) {
        dot += ta[i] * tb[i];
        na2 += ta[i] * ta[i];
        nb2 += tb[i] * tb[i];
    }
    if (na2 == 0.0 || nb2 == 0.0)
        throw DataError("cosine: degenerate zero-norm input");
    const double na = std::sqrt(na2), nb = std::sqrt(nb2);
    const double cos = dot / (na * nb);
    return push(Tensor::scalar(cos),
                [this, a, b, na, nb, cos, id = static_cast<int>(nodes_.size())] {
                    const double g = nodes_[id].grad[0];
                    const Tensor& ta = value(a);
                    const Tensor& tb = value(b);
                    for (int i = 0; i < ta.size(); ++i) {
                        grad_ref(a)[i] += g * (tb[i] / (na * nb) - cos * ta[i] / (na * na));
                        grad_ref(b)[i] += g * (ta[i] / (na * nb) - cos * tb[i] / (nb * nb));
                    }
                });
}

}  // namespace trackref::nn
