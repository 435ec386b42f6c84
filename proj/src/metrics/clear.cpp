#include <map>

#include <trackref/core/errors.hpp>
#include <trackref/metrics/evaluate.hpp>
#include <trackref/tracking/hungarian.hpp>

namespace trackref::metrics {

namespace {

long total_boxes(const SequenceIndex& index) {
    long n = 0;
    for (const auto& [frame, fb] : index) n += static_cast<long>(fb.ids.size());
    return n;
}

}  // namespace

double mota(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred, double alpha) {
    SequenceIndex gt_index = index_tracklets(gt);
    SequenceIndex pred_index = index_tracklets(pred);
    const long total_gt = total_boxes(gt_index);
    if (total_gt == 0)
        throw DataError("mota: undefined for empty ground truth");

    long fn = 0, fp = 0, idsw = 0;
    // gt id -> (frame, pred id) of its most recent match
    std::map<int, std::pair<int, int>> last_match;

    std::map<int, const FrameBoxes*> frames;
    for (const auto& [frame, fb] : gt_index) frames[frame] = nullptr;
    for (const auto& [frame, fb] : pred_index) frames[frame] = nullptr;

    for (const auto& [frame, unused] : frames) {
        static const FrameBoxes empty;
        const FrameBoxes& g = gt_index.count(frame) ? gt_index.at(frame) : empty;
        const FrameBoxes& p = pred_index.count(frame) ? pred_index.at(frame) : empty;
        auto pairs = match_frame(g.boxes, p.boxes, alpha);
        fn += static_cast<long>(g.ids.size() - pairs.size());
        fp += static_cast<long>(p.ids.size() - pairs.size());
        for (const auto& [gi, pi] : pairs) {
            const int gt_id = g.ids[gi];
            const int pred_id = p.ids[pi];
            auto it = last_match.find(gt_id);
            if (it != last_match.end() && it->second.first == frame - 1 &&
                it->second.second != pred_id)
                ++idsw;
            last_match[gt_id] = {frame, pred_id};
        }
    }
    return 1.0 - static_cast<double>(fn + fp + idsw) / static_cast<double>(total_gt);
}

double idf1(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred, double alpha) {
    SequenceIndex gt_index = index_tracklets(gt);
    const long total_gt = total_boxes(gt_index);
    if (total_gt == 0)
        throw DataError("idf1: undefined for empty ground truth");
    SequenceIndex pred_index = index_tracklets(pred);
    const long total_pred = total_boxes(pred_index);

    // overlap counts per (gt trajectory, pred trajectory)
    std::map<int, int> gt_slot, pred_slot;
    for (const Tracklet& t : gt) gt_slot.emplace(t.track_id, static_cast<int>(gt_slot.size()));
    for (const Tracklet& t : pred)
        pred_slot.emplace(t.track_id, static_cast<int>(pred_slot.size()));
    Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(gt_slot.size(), pred_slot.size());
    for (const auto& [frame, g] : gt_index) {
        if (!pred_index.count(frame)) continue;
        const FrameBoxes& p = pred_index.at(frame);
        for (size_t gi = 0; gi < g.boxes.size(); ++gi)
            for (size_t pi = 0; pi < p.boxes.size(); ++pi)
                if (iou(g.boxes[gi], p.boxes[pi]) >= alpha)
                    overlap(gt_slot.at(g.ids[gi]), pred_slot.at(p.ids[pi])) += 1.0;
    }
    if (total_pred == 0) return 0.0;

    // min-cost trajectory assignment maximizing total overlap
    tracking::Assignment a = tracking::hungarian(-overlap);
    double idtp = 0.0;
    for (size_t r = 0; r < static_cast<size_t>(overlap.rows()); ++r)
        if (a.row_to_col[r] >= 0) idtp += overlap(r, a.row_to_col[r]);
    const double idfn = static_cast<double>(total_gt) - idtp;
    const double idfp = static_cast<double>(total_pred) - idtp;
    return 2.0 * idtp / (2.0 * idtp + idfp + idfn);
}

}  // namespace trackref::metrics
