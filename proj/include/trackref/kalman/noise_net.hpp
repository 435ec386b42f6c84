#pragma once

#include <filesystem>
#include <random>

#include <trackref/kalman/kalman_filter.hpp>
#include <trackref/nn/layers.hpp>

namespace trackref::kalman {

// Learned noise model: R-Net maps the current observation to the
// observation-noise diagonal, Q-Net maps the previous state mean to the
// process-noise diagonal. Both are two-layer perceptrons whose softplus
// outputs are scaled by base magnitudes and floored at 1e-8.
struct NoiseNet {
    nn::DenseLayer r_hidden, r_out;  // 4 -> hidden -> 4
    nn::DenseLayer q_hidden, q_out;  // 8 -> hidden -> 8
    double base_q = 1.0;
    double base_r = 1.0;
    // Positional inputs are multiplied by this before entering the nets
    // (1 / image diagonal); the dimensionless aspect entry is left as is.
    double input_scale = 1.0;

    static NoiseNet init(int hidden, double base_q, double base_r, double input_scale,
                         std::mt19937& rng);

    int hidden_width() const { return r_hidden.out_dim(); }

    Eigen::Matrix<double, 4, 1> r_diag(const Vec4& z) const;
    Eigen::Matrix<double, 8, 1> q_diag(const Vec8& x_prev) const;

    void save(const std::filesystem::path& file) const;
    static NoiseNet load(const std::filesystem::path& file);
};

// Eq-style noise evaluation: R = diag(softplus(r_net(z))) * base_r,
// Q = diag(softplus(q_net(x_prev))) * base_q.
NoiseParams nkf_noise(const NoiseNet& net, const Vec4& z, const Vec8& x_prev);

Vec4 normalize_obs(const Vec4& z, double scale);
Vec8 normalize_state(const Vec8& x, double scale);

}  // namespace trackref::kalman
