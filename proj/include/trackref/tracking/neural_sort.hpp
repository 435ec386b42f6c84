#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include <trackref/core/types.hpp>
#include <trackref/kalman/kalman_filter.hpp>
#include <trackref/kalman/noise_net.hpp>

namespace trackref::tracking {

enum class TrackStatus { Tentative, Confirmed, Deleted };

struct Track {
    int track_id = 0;
    kalman::FilterState filter;
    int hits = 1;
    int age = 0;
    int time_since_update = 0;
    TrackStatus status = TrackStatus::Tentative;
    BBox last_observed_box;
    std::optional<Eigen::Vector2d> velocity_dir;  // unit, from observed centers
    std::vector<std::pair<int, BBox>> history;    // confirmed posterior boxes
    BBox predicted_box;                           // current-frame prediction
};

struct TrackerConfig {
    double iou_gate = 0.1;
    double lambda_vel = 0.2;       // VEL weight; 0 disables the velocity term
    int max_age = 30;
    int n_init = 3;
    bool byte_mode = true;
    double high_thresh = 0.6;
    double low_thresh = 0.1;
    bool use_nkf = false;
    bool use_exit = true;          // DEL: delete tracks predicted off-image
    double image_width = 0.0;
    double image_height = 0.0;
    int interp_max_gap = 20;       // INT; 0 disables interpolation
    double base_q = 1.0;           // fixed-noise magnitudes when use_nkf is off
    double base_r = 1.0;

    void validate() const;
};

// cost = 1 - cos(angle between the track's velocity direction and the
// displacement toward the detection); 0 without a velocity estimate or for
// zero displacement.
double velocity_cost(const Track& track, const Detection& det);

// cost(i, j) = (1 - iou) + lambda_vel * velocity_cost, with pairs below the
// IoU gate set to the forbidden sentinel.
Eigen::MatrixXd association_cost(const std::vector<const Track*>& tracks,
                                 const std::vector<const Detection*>& dets,
                                 const TrackerConfig& cfg);

// True when the predicted box center lies outside [0, W) x [0, H).
bool exit_decision(const Track& track, const TrackerConfig& cfg);

// NeuralSORT: two-stage (Byte-style) association over a (neural) Kalman
// filter with exit decision, velocity cost and interpolation switches.
class NeuralSort {
public:
    explicit NeuralSort(TrackerConfig cfg, std::optional<kalman::NoiseNet> nkf = std::nullopt);

    // Processes one frame (indices must be strictly increasing) and returns
    // the confirmed, just-updated track boxes.
    std::vector<std::pair<int, BBox>> step(int frame, const std::vector<Detection>& dets);

    // Confirmed trajectories accumulated so far, including deleted tracks.
    std::vector<Tracklet> tracklets() const;

    const std::vector<Track>& tracks() const { return tracks_; }

private:
    void predict_all();
    void update_track(Track& track, const Detection& det, int frame);
    void spawn(const Detection& det);

    TrackerConfig cfg_;
    std::optional<kalman::NoiseNet> nkf_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    int last_frame_ = 0;
};

}  // namespace trackref::tracking
