#include <trackref/kalman/noise_net.hpp>

#include <cmath>

#include <trackref/core/errors.hpp>
#include <trackref/nn/weights_io.hpp>

namespace trackref::kalman {

namespace {

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

NoiseNet NoiseNet::init(int hidden, double base_q, double base_r, double input_scale,
                        std::mt19937& rng) {
    if (hidden < 1)
        throw ConfigError("noise net hidden width must be >= 1");
    NoiseNet n;
    n.r_hidden = nn::DenseLayer::init(4, hidden, nn::Activation::Relu, rng);
    n.r_out = nn::DenseLayer::init(hidden, 4, nn::Activation::Identity, rng);
    n.q_hidden = nn::DenseLayer::init(8, hidden, nn::Activation::Relu, rng);
    n.q_out = nn::DenseLayer::init(hidden, 8, nn::Activation::Identity, rng);
    n.base_q = base_q;
    n.base_r = base_r;
    n.input_scale = input_scale;
    return n;
}

Vec4 normalize_obs(const Vec4& z, double scale) {
    return Vec4(z[0] * scale, z[1] * scale, z[2], z[3] * scale);
}

Vec8 normalize_state(const Vec8& x, double scale) {
    Vec8 out = x * scale;
    out[2] = x[2];
    out[6] = x[6];
    return out;
}

Eigen::Matrix<double, 4, 1> NoiseNet::r_diag(const Vec4& z) const {
    const Vec4 zn = normalize_obs(z, input_scale);
    nn::Tensor x({4}, {zn[0], zn[1], zn[2], zn[3]});
    nn::Tensor raw = r_out.forward(r_hidden.forward(x));
    Eigen::Matrix<double, 4, 1> d;
    for (int i = 0; i < 4; ++i) d[i] = base_r * softplus(raw[i]) + 1e-8;
    return d;
}

Eigen::Matrix<double, 8, 1> NoiseNet::q_diag(const Vec8& x_prev) const {
    const Vec8 xn = normalize_state(x_prev, input_scale);
    nn::Tensor x({8}, std::vector<double>(xn.data(), xn.data() + 8));
    nn::Tensor raw = q_out.forward(q_hidden.forward(x));
    Eigen::Matrix<double, 8, 1> d;
    for (int i = 0; i < 8; ++i) d[i] = base_q * softplus(raw[i]) + 1e-8;
    return d;
}

NoiseParams nkf_noise(const NoiseNet& net, const Vec4& z, const Vec8& x_prev) {
    NoiseParams out;
    out.R = net.r_diag(z).asDiagonal();
    out.Q = net.q_diag(x_prev).asDiagonal();
    return out;
}

void NoiseNet::save(const std::filesystem::path& file) const {
    nn::WeightsFile w;
    w.kind = "noise-net";
    w.meta["base_q"] = base_q;
    w.meta["base_r"] = base_r;
    w.meta["hidden"] = hidden_width();
    w.meta["input_scale"] = input_scale;
    w.entries.emplace_back("r_hidden.weight", r_hidden.weight);
    w.entries.emplace_back("r_hidden.bias", r_hidden.bias);
    w.entries.emplace_back("r_out.weight", r_out.weight);
    w.entries.emplace_back("r_out.bias", r_out.bias);
    w.entries.emplace_back("q_hidden.weight", q_hidden.weight);
    w.entries.emplace_back("q_hidden.bias", q_hidden.bias);
    w.entries.emplace_back("q_out.weight", q_out.weight);
    w.entries.emplace_back("q_out.bias", q_out.bias);
    save_weights(w, file);
}

NoiseNet NoiseNet::load(const std::filesystem::path& file) {
    nn::WeightsFile w = nn::load_weights(file, "noise-net");
    NoiseNet n;
    n.base_q = w.meta.at("base_q").get<double>();
    n.base_r = w.meta.at("base_r").get<double>();
    n.input_scale = w.meta.value("input_scale", 1.0);
    n.r_hidden = {w.find("r_hidden.weight"), w.find("r_hidden.bias"), nn::Activation::Relu};
    n.r_out = {w.find("r_out.weight"), w.find("r_out.bias"), nn::Activation::Identity};
    n.q_hidden = {w.find("q_hidden.weight"), w.find("q_hidden.bias"), nn::Activation::Relu};
    n.q_out = {w.find("q_out.weight"), w.find("q_out.bias"), nn::Activation::Identity};
    return n;
}

}  // namespace trackref::kalman
