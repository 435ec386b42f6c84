#include <trackref/kalman/kalman_filter.hpp>

#include <Eigen/Cholesky>

#include <trackref/core/errors.hpp>

namespace trackref::kalman {

MotionModel::MotionModel() {
    F = Mat8::Identity();
    for (int i = 0; i < 4; ++i) F(i, i + 4) = 1.0;
    H = Mat48::Zero();
    for (int i = 0; i < 4; ++i) H(i, i) = 1.0;
}

const MotionModel& motion_model() {
    static const MotionModel m;
    return m;
}

NoiseParams NoiseParams::fixed(double base_q, double base_r) {
    if (base_q <= 0.0 || base_r <= 0.0)
        throw DataError("noise diagonals must be strictly positive");
    NoiseParams n;
    n.Q = base_q * Mat8::Identity();
    n.Q(2, 2) = base_q * 1e-4;
    n.Q(6, 6) = base_q * 1e-6;
    n.R = base_r * Mat4::Identity();
    n.R(2, 2) = base_r * 1e-4;
    return n;
}

FilterState kf_init(const Vec4& z, double w_pos, double w_vel) {
    FilterState s;
    s.mean.head<4>() = z;
    const double h = z[3];
    Vec8 std;
    std << 2 * w_pos * h, 2 * w_pos * h, 1e-2, 2 * w_pos * h,
           10 * w_vel * h, 10 * w_vel * h, 1e-5, 10 * w_vel * h;
    s.covariance = std.cwiseProduct(std).asDiagonal();
    return s;
}

FilterState kf_predict(const FilterState& s, const MotionModel& m, const Mat8& Q) {
    FilterState out;
    out.mean = m.F * s.mean;
    Mat8 cov = m.F * s.covariance * m.F.transpose() + Q;
    out.covariance = 0.5 * (cov + cov.transpose());
    return out;
}

Mat84 kf_gain(const Mat8& cov_pred, const MotionModel& m, const Mat4& R) {
    Mat4 innovation_cov = m.H * cov_pred * m.H.transpose() + R;
    Eigen::LLT<Mat4> llt(innovation_cov);
    double jitter = 1e-9;
    int attempts = 0;
    while (llt.info() != Eigen::Success && attempts < 8) {
        innovation_cov.diagonal().array() += jitter;
        llt.compute(innovation_cov);
        jitter *= 10.0;
        ++attempts;
    }
    if (llt.info() != Eigen::Success) {
        const double dmax = innovation_cov.diagonal().maxCoeff();
        const double dmin = innovation_cov.diagonal().minCoeff();
        throw NumericError("kalman gain: innovation covariance not positive definite "
                           "(diagonal range " + std::to_string(dmin) + " .. " +
                           std::to_string(dmax) + ")");
    }
    // K = P' H^T S^-1  <=>  K^T = S^-1 (H P')
    return llt.solve(m.H * cov_pred).transpose();
}

FilterState kf_update(const FilterState& pred, const Vec4& z, const MotionModel& m,
                      const Mat4& R) {
    const Mat84 K = kf_gain(pred.covariance, m, R);
    FilterState out;
    out.mean = pred.mean + K * (z - m.H * pred.mean);
    Mat8 cov = (Mat8::Identity() - K * m.H) * pred.covariance;
    out.covariance = 0.5 * (cov + cov.transpose());
    return out;
}

}  // namespace trackref::kalman
