#pragma once

#include <random>
#include <string>
#include <vector>

namespace trackref::nn {

// Dense row-major tensor of doubles. Rank 1 and 2 cover every model in this
// toolkit; higher-rank inputs (time x space x channel) are handled as
// per-frame matrices by the callers.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);
    Tensor(std::vector<int> shape, std::vector<double> data);

    static Tensor scalar(double v) { return Tensor({1}, {v}); }
    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<int> shape, double v);
    static Tensor identity(int n);

    const std::vector<int>& shape() const { return shape_; }
    int size() const { return static_cast<int>(data_.size()); }
    int rank() const { return static_cast<int>(shape_.size()); }
    int rows() const { return shape_.empty() ? 0 : shape_[0]; }
    int cols() const { return rank() == 2 ? shape_[1] : 1; }

    double& operator[](int i) { return data_[i]; }
    double operator[](int i) const { return data_[i]; }
    double& at(int r, int c) { return data_[static_cast<size_t>(r) * shape_[1] + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * shape_[1] + c]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    std::string shape_str() const;

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

// Uniform parameter init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] from the
// given generator; the seeded generator keeps runs bit-reproducible.
Tensor uniform_init(std::vector<int> shape, int fan_in, std::mt19937& rng);

}  // namespace trackref::nn
