#include <trackref/tracking/neural_sort.hpp>

#include <algorithm>
#include <cmath>

#include <trackref/core/errors.hpp>
#include <trackref/tracking/hungarian.hpp>

namespace trackref::tracking {

void TrackerConfig::validate() const {
    if (!(0.0 <= low_thresh && low_thresh <= high_thresh && high_thresh <= 1.0))
        throw ConfigError("tracker thresholds must satisfy 0 <= low <= high <= 1");
    if (max_age < 1)
        throw ConfigError("tracker max_age must be >= 1");
    if (n_init < 1)
        throw ConfigError("tracker n_init must be >= 1");
    if (iou_gate < 0.0 || iou_gate > 1.0)
        throw ConfigError("tracker iou_gate must lie in [0, 1]");
}

double velocity_cost(const Track& track, const Detection& det) {
    if (!track.velocity_dir) return 0.0;
    const double dx = det.bbox.cx() - track.last_observed_box.cx();
    const double dy = det.bbox.cy() - track.last_observed_box.cy();
    const double norm = std::hypot(dx, dy);
    if (norm == 0.0) return 0.0;
    const double cos_angle = ((*track.velocity_dir)[0] * dx + (*track.velocity_dir)[1] * dy) / norm;
    return 1.0 - cos_angle;
}

Eigen::MatrixXd association_cost(const std::vector<const Track*>& tracks,
                                 const std::vector<const Detection*>& dets,
                                 const TrackerConfig& cfg) {
    Eigen::MatrixXd cost(tracks.size(), dets.size());
    for (size_t i = 0; i < tracks.size(); ++i)
        for (size_t j = 0; j < dets.size(); ++j) {
            const double overlap = iou(tracks[i]->predicted_box, dets[j]->bbox);
            if (overlap < cfg.iou_gate) {
                cost(i, j) = kForbidden;
                continue;
            }
            cost(i, j) = (1.0 - overlap) + cfg.lambda_vel * velocity_cost(*tracks[i], *dets[j]);
        }
    return cost;
}

bool exit_decision(const Track& track, const TrackerConfig& cfg) {
    const double cx = track.predicted_box.cx();
    const double cy = track.predicted_box.cy();
    return cx < 0.0 || cx >= cfg.image_width || cy < 0.0 || cy >= cfg.image_height;
}

NeuralSort::NeuralSort(TrackerConfig cfg, std::optional<kalman::NoiseNet> nkf)
    : cfg_(std::move(cfg)), nkf_(std::move(nkf)) {
    cfg_.validate();
    if (cfg_.use_nkf && !nkf_)
        throw ConfigError("use_nkf requires noise-net weights");
}

void NeuralSort::predict_all() {
    const auto& m = kalman::motion_model();
    for (Track& t : tracks_) {
        if (t.status == TrackStatus::Deleted) continue;
        kalman::Mat8 q;
        if (cfg_.use_nkf)
            q = nkf_->q_diag(t.filter.mean).asDiagonal();
        else
            q = kalman::NoiseParams::fixed(cfg_.base_q, cfg_.base_r).Q;
        t.filter = kf_predict(t.filter, m, q);
        // keep aspect and height physical under constant-velocity coasting
        if (t.filter.mean[2] < 1e-4) {
            t.filter.mean[2] = 1e-4;
            t.filter.mean[6] = 0.0;
        }
        if (t.filter.mean[3] < 1e-2) {
            t.filter.mean[3] = 1e-2;
            t.filter.mean[7] = 0.0;
        }
        t.predicted_box = t.filter.box();
        ++t.age;
    }
}

void NeuralSort::update_track(Track& track, const Detection& det, int frame) {
    const auto& m = kalman::motion_model();
    const kalman::Vec4 z = kalman::observation(det.bbox);
    kalman::Mat4 r;
    if (cfg_.use_nkf)
        r = nkf_->r_diag(z).asDiagonal();
    else
        r = kalman::NoiseParams::fixed(cfg_.base_q, cfg_.base_r).R;
    track.filter = kf_update(track.filter, z, m, r);

    const double dx = det.bbox.cx() - track.last_observed_box.cx();
    const double dy = det.bbox.cy() - track.last_observed_box.cy();
    const double norm = std::hypot(dx, dy);
    if (norm > 0.0) track.velocity_dir = Eigen::Vector2d(dx / norm, dy / norm);
    track.last_observed_box = det.bbox;
    track.time_since_update = 0;
    ++track.hits;
    if (track.status == TrackStatus::Tentative && track.hits >= cfg_.n_init)
        track.status = TrackStatus::Confirmed;
    if (track.status == TrackStatus::Confirmed)
        track.history.emplace_back(frame, track.filter.box());
}

void NeuralSort::spawn(const Detection& det) {
    Track t;
    t.track_id = next_id_++;
    t.filter = kalman::kf_init(kalman::observation(det.bbox));
    t.last_observed_box = det.bbox;
    t.predicted_box = det.bbox;
    t.status = cfg_.n_init <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
    tracks_.push_back(std::move(t));
}

std::vector<std::pair<int, BBox>> NeuralSort::step(int frame, const std::vector<Detection>& dets) {
    if (frame <= last_frame_)
        throw DataError("tracker frames must arrive strictly increasing (got " +
                        std::to_string(frame) + " after " + std::to_string(last_frame_) + ")");
    last_frame_ = frame;

    predict_all();

    std::vector<const Detection*> high, low;
    for (const Detection& d : dets) {
        if (d.confidence >= cfg_.high_thresh)
            high.push_back(&d);
        else if (d.confidence >= cfg_.low_thresh)
            low.push_back(&d);
    }

    std::vector<Track*> active;
    for (Track& t : tracks_)
        if (t.status != TrackStatus::Deleted) active.push_back(&t);

    std::vector<char> track_matched(active.size(), 0);
    std::vector<char> high_matched(high.size(), 0);

    // stage 1: high-confidence detections with the full association cost
    {
        std::vector<const Track*> rows(active.begin(), active.end());
        Assignment a = hungarian(association_cost(rows, high, cfg_));
        for (size_t i = 0; i < active.size(); ++i)
            if (a.row_to_col[i] >= 0) {
                update_track(*active[i], *high[a.row_to_col[i]], frame);
                track_matched[i] = 1;
                high_matched[a.row_to_col[i]] = 1;
            }
    }

    // stage 2: leftover tracks against low-confidence detections on pure IoU
    if (cfg_.byte_mode && !low.empty()) {
        std::vector<Track*> leftover;
        std::vector<size_t> leftover_idx;
        for (size_t i = 0; i < active.size(); ++i)
            if (!track_matched[i]) {
                leftover.push_back(active[i]);
                leftover_idx.push_back(i);
            }
        Eigen::MatrixXd cost(leftover.size(), low.size());
        for (size_t i = 0; i < leftover.size(); ++i)
            for (size_t j = 0; j < low.size(); ++j) {
                const double overlap = iou(leftover[i]->predicted_box, low[j]->bbox);
                cost(i, j) = overlap < cfg_.iou_gate ? kForbidden : 1.0 - overlap;
            }
        Assignment a = hungarian(cost);
        for (size_t i = 0; i < leftover.size(); ++i)
            if (a.row_to_col[i] >= 0) {
                update_track(*leftover[i], *low[a.row_to_col[i]], frame);
                track_matched[leftover_idx[i]] = 1;
            }
    }

    // age out, exit decision, births
    for (size_t i = 0; i < active.size(); ++i) {
        Track& t = *active[i];
        if (!track_matched[i]) {
            ++t.time_since_update;
            if (t.status == TrackStatus::Tentative)
                t.status = TrackStatus::Deleted;
            else if (t.time_since_update > cfg_.max_age)
                t.status = TrackStatus::Deleted;
        }
        if (t.status != TrackStatus::Deleted && cfg_.use_exit && exit_decision(t, cfg_))
            t.status = TrackStatus::Deleted;
    }
    for (size_t j = 0; j < high.size(); ++j)
        if (!high_matched[j]) spawn(*high[j]);

    std::vector<std::pair<int, BBox>> out;
    for (const Track& t : tracks_)
        if (t.status == TrackStatus::Confirmed && t.time_since_update == 0 &&
            !t.history.empty() && t.history.back().first == frame)
            out.emplace_back(t.track_id, t.history.back().second);
    return out;
}

std::vector<Tracklet> NeuralSort::tracklets() const {
    std::vector<Tracklet> out;
    for (const Track& t : tracks_) {
        if (t.history.empty()) continue;
        Tracklet trk;
        trk.track_id = t.track_id;
        trk.entries = t.history;
        out.push_back(std::move(trk));
    }
    return out;
}

}  // namespace trackref::tracking
