#include <trackref/metrics/matching.hpp>

#include <trackref/tracking/hungarian.hpp>

namespace trackref::metrics {

SequenceIndex index_tracklets(const std::vector<Tracklet>& tracks) {
    SequenceIndex index;
    for (const Tracklet& t : tracks)
        for (const auto& [frame, box] : t.entries) {
            FrameBoxes& fb = index[frame];
            fb.ids.push_back(t.track_id);
            fb.boxes.push_back(box);
        }
    return index;
}

std::vector<std::pair<int, int>> match_frame(const std::vector<BBox>& gt,
                                             const std::vector<BBox>& pred, double alpha) {
    std::vector<std::pair<int, int>> out;
    if (gt.empty() || pred.empty()) return out;
    Eigen::MatrixXd cost(gt.size(), pred.size());
    for (size_t g = 0; g < gt.size(); ++g)
        for (size_t p = 0; p < pred.size(); ++p) {
            const double overlap = iou(gt[g], pred[p]);
            cost(g, p) = overlap >= alpha ? 1.0 - overlap : tracking::kForbidden;
        }
    tracking::Assignment a = tracking::hungarian(cost);
    for (size_t g = 0; g < gt.size(); ++g)
        if (a.row_to_col[g] >= 0) out.emplace_back(static_cast<int>(g), a.row_to_col[g]);
    return out;
}

}  // namespace trackref::metrics
