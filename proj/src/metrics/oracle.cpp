#include <trackref/metrics/oracle.hpp>

#include <map>

#include <trackref/metrics/matching.hpp>

namespace trackref::metrics {

std::vector<Tracklet> oracle_revise(const std::vector<Tracklet>& pred,
                                    const std::vector<Tracklet>& gt, double alpha) {
    SequenceIndex gt_index = index_tracklets(gt);
    SequenceIndex pred_index = index_tracklets(pred);

    // (frame, pred id) -> revised box
    std::map<std::pair<int, int>, BBox> revised;
    for (const auto& [frame, p] : pred_index) {
        auto it = gt_index.find(frame);
        if (it == gt_index.end()) continue;
        const FrameBoxes& g = it->second;
        for (const auto& [gi, pi] : match_frame(g.boxes, p.boxes, alpha))
            revised[{frame, p.ids[pi]}] = g.boxes[gi];
    }

    std::vector<Tracklet> out = pred;
    for (Tracklet& t : out)
        for (auto& [frame, box] : t.entries) {
            auto it = revised.find({frame, t.track_id});
            if (it != revised.end()) box = it->second;
        }
    return out;
}

}  // namespace trackref::metrics
