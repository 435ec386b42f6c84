#pragma once

#include <Eigen/Dense>

#include <trackref/core/bbox.hpp>

namespace trackref::kalman {

using Vec4 = Eigen::Vector4d;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix4d;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat48 = Eigen::Matrix<double, 4, 8>;
using Mat84 = Eigen::Matrix<double, 8, 4>;

// State is (cx, cy, aspect, h) plus per-frame velocities; observations are
// the first four components.
struct FilterState {
    Vec8 mean = Vec8::Zero();
    Mat8 covariance = Mat8::Zero();

    BBox box() const { return BBox::from_center({mean[0], mean[1], mean[2], mean[3]}); }
};

// Constant-velocity transition (dt = 1 frame) and observation projection.
struct MotionModel {
    Mat8 F;
    Mat48 H;
    MotionModel();
};

const MotionModel& motion_model();

struct NoiseParams {
    Mat8 Q = Mat8::Identity();
    Mat4 R = Mat4::Identity();

    // Isotropic diagonals in pixel units. The aspect dimension is O(1)
    // while positions are O(100) px, so its entries are scaled down.
    static NoiseParams fixed(double base_q, double base_r);
};

inline Vec4 observation(const BBox& b) {
    auto c = b.to_center();
    return Vec4(c[0], c[1], c[2], c[3]);
}

// Track birth: mean = [z, 0, 0, 0, 0]; covariance is diagonal with
//   std = (2 w_p h, 2 w_p h, 0.01, 2 w_p h, 10 w_v h, 10 w_v h, 1e-5, 10 w_v h)
// squared, defaults w_p = 1/20, w_v = 1/160.
FilterState kf_init(const Vec4& z, double w_pos = 1.0 / 20.0, double w_vel = 1.0 / 160.0);

// mean' = F mean; cov' = F cov F^T + Q, re-symmetrized.
FilterState kf_predict(const FilterState& s, const MotionModel& m, const Mat8& Q);

// K = cov' H^T (H cov' H^T + R)^-1, solved by Cholesky with 1e-9 jitter.
Mat84 kf_gain(const Mat8& cov_pred, const MotionModel& m, const Mat4& R);

// mean = mean' + K (z - H mean'); cov = (I - K H) cov', re-symmetrized.
FilterState kf_update(const FilterState& pred, const Vec4& z, const MotionModel& m, const Mat4& R);

}  // namespace trackref::kalman
