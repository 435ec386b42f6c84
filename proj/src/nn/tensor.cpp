#include <trackref/nn/tensor.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

#include <trackref/core/errors.hpp>

namespace trackref::nn {

namespace {

size_t shape_size(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d <= 0)
            throw DataError("tensor dimensions must be positive");
        n *= static_cast<size_t>(d);
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_size(shape_) != data_.size())
        throw DataError("tensor data length does not match shape " + shape_str());
}

Tensor Tensor::full(std::vector<int> shape, double v) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
}

Tensor Tensor::identity(int n) {
    Tensor t({n, n});
    for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream ss;
    ss << '[';
    for (size_t i = 0; i < shape_.size(); ++i) ss << (i ? "," : "") << shape_[i];
    ss << ']';
    return ss.str();
}

Tensor uniform_init(std::vector<int> shape, int fan_in, std::mt19937& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = dist(rng);
    return t;
}

}  // namespace trackref::nn
