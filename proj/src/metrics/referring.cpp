#include <trackref/metrics/referring.hpp>

#include <set>

namespace trackref::metrics {

namespace {

std::vector<Tracklet> restrict_gt(const std::vector<Tracklet>& gt, const DescriptionRecord& desc) {
    std::vector<Tracklet> out;
    for (const Tracklet& t : gt) {
        Tracklet kept;
        kept.track_id = t.track_id;
        for (const auto& [frame, box] : t.entries) {
            auto it = desc.positives.find(frame);
            if (it != desc.positives.end() && it->second.count(t.track_id))
                kept.entries.emplace_back(frame, box);
        }
        if (!kept.entries.empty()) out.push_back(std::move(kept));
    }
    return out;
}

std::vector<Tracklet> filter_pred(const std::vector<Tracklet>& pred, int desc_id,
                                  const ScoreTable& scores, const ReferringOptions& opt) {
    std::vector<Tracklet> out;
    if (opt.frame_scores) {
        for (const Tracklet& t : pred) {
            Tracklet kept;
            kept.track_id = t.track_id;
            for (const auto& [frame, box] : t.entries) {
                auto it = opt.frame_scores->find({t.track_id, frame});
                if (it != opt.frame_scores->end() && it->second > opt.score_threshold)
                    kept.entries.emplace_back(frame, box);
            }
            if (!kept.entries.empty()) out.push_back(std::move(kept));
        }
        return out;
    }
    for (const Tracklet& t : pred)
        for (const ScoreRow& row : scores.rows)
            if (row.track_id == t.track_id && row.desc_id == desc_id &&
                row.aggregate_score > opt.score_threshold) {
                out.push_back(t);
                break;
            }
    return out;
}

// drop frames where the restricted ground truth is empty
std::vector<Tracklet> drop_empty_gt_frames(const std::vector<Tracklet>& pred,
                                           const std::vector<Tracklet>& gt) {
    std::set<int> gt_frames;
    for (const Tracklet& t : gt)
        for (const auto& [frame, box] : t.entries) gt_frames.insert(frame);
    std::vector<Tracklet> out;
    for (const Tracklet& t : pred) {
        Tracklet kept;
        kept.track_id = t.track_id;
        for (const auto& [frame, box] : t.entries)
            if (gt_frames.count(frame)) kept.entries.emplace_back(frame, box);
        if (!kept.entries.empty()) out.push_back(std::move(kept));
    }
    return out;
}

}  // namespace

ReferringResult evaluate_referring(const std::vector<Tracklet>& gt,
                                   const std::vector<DescriptionRecord>& descs,
                                   const std::vector<Tracklet>& pred, const ScoreTable& scores,
                                   const ReferringOptions& opt) {
    ReferringResult result;
    int n = 0;
    for (const DescriptionRecord& desc : descs) {
        std::vector<Tracklet> gt_desc = restrict_gt(gt, desc);
        if (gt_desc.empty()) {
            result.skipped_descs.push_back(desc.desc_id);
            continue;
        }
        std::vector<Tracklet> pred_desc = filter_pred(pred, desc.desc_id, scores, opt);
        if (!opt.fp_on_empty_frames) pred_desc = drop_empty_gt_frames(pred_desc, gt_desc);
        EvalResult r = evaluate(gt_desc, pred_desc);
        result.mean.hota += r.hota;
        result.mean.deta += r.deta;
        result.mean.assa += r.assa;
        result.mean.detre += r.detre;
        result.mean.detpr += r.detpr;
        result.mean.assre += r.assre;
        result.mean.asspr += r.asspr;
        result.mean.mota += r.mota;
        result.mean.idf1 += r.idf1;
        result.per_desc.emplace_back(desc.desc_id, std::move(r));
        ++n;
    }
    if (n > 0) {
        result.mean.hota /= n;
        result.mean.deta /= n;
        result.mean.assa /= n;
        result.mean.detre /= n;
        result.mean.detpr /= n;
        result.mean.assre /= n;
        result.mean.asspr /= n;
        result.mean.mota /= n;
        result.mean.idf1 /= n;
    }
    return result;
}

}  // namespace trackref::metrics
