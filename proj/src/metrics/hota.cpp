#include <cmath>
#include <map>

#include <trackref/core/errors.hpp>
#include <trackref/metrics/evaluate.hpp>

namespace trackref::metrics {

namespace {

struct PairKey {
    int gt_id;
    int pred_id;
    bool operator<(const PairKey& o) const {
        return gt_id != o.gt_id ? gt_id < o.gt_id : pred_id < o.pred_id;
    }
};

}  // namespace

HotaAtAlpha hota_at(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred,
                    double alpha) {
    SequenceIndex gt_index = index_tracklets(gt);
    SequenceIndex pred_index = index_tracklets(pred);

    std::map<PairKey, long> pair_tp;
    std::map<int, long> gt_count, pred_count;
    for (const auto& [frame, fb] : gt_index)
        for (int id : fb.ids) ++gt_count[id];
    for (const auto& [frame, fb] : pred_index)
        for (int id : fb.ids) ++pred_count[id];

    HotaAtAlpha r;
    static const FrameBoxes empty;
    for (const auto& [frame, g] : gt_index) {
        const bool has_pred = pred_index.count(frame) > 0;
        const FrameBoxes& p = has_pred ? pred_index.at(frame) : empty;
        auto pairs = match_frame(g.boxes, p.boxes, alpha);
        r.tp += static_cast<long>(pairs.size());
        r.fn += static_cast<long>(g.ids.size() - pairs.size());
        if (has_pred) r.fp += static_cast<long>(p.ids.size() - pairs.size());
        for (const auto& [gi, pi] : pairs) ++pair_tp[PairKey{g.ids[gi], p.ids[pi]}];
    }
    // prediction-only frames contribute false positives
    for (const auto& [frame, p] : pred_index)
        if (!gt_index.count(frame)) r.fp += static_cast<long>(p.ids.size());

    if (r.tp + r.fn == 0)
        throw DataError("hota: undefined for empty ground truth");

    r.detre = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    r.detpr = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
    r.deta = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn + r.fp);

    if (r.tp > 0) {
        double ass_sum = 0.0, re_sum = 0.0, pr_sum = 0.0;
        for (const auto& [key, tpa] : pair_tp) {
            const long fna = gt_count.at(key.gt_id) - tpa;
            const long fpa = pred_count.at(key.pred_id) - tpa;
            ass_sum += static_cast<double>(tpa) * tpa / static_cast<double>(tpa + fna + fpa);
            re_sum += static_cast<double>(tpa) * tpa / static_cast<double>(tpa + fna);
            pr_sum += static_cast<double>(tpa) * tpa / static_cast<double>(tpa + fpa);
        }
        r.assa = ass_sum / static_cast<double>(r.tp);
        r.assre = re_sum / static_cast<double>(r.tp);
        r.asspr = pr_sum / static_cast<double>(r.tp);
    }
    r.hota = std::sqrt(r.deta * r.assa);
    return r;
}

EvalResult evaluate(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred) {
    EvalResult out;
    int n = 0;
    for (double alpha = 0.05; alpha < 0.951; alpha += 0.05) {
        HotaAtAlpha h = hota_at(gt, pred, alpha);
        out.hota += h.hota;
        out.deta += h.deta;
        out.assa += h.assa;
        out.detre += h.detre;
        out.detpr += h.detpr;
        out.assre += h.assre;
        out.asspr += h.asspr;
        out.counts.push_back(ThresholdCounts{alpha, h.tp, h.fp, h.fn, 0});
        ++n;
    }
    out.hota /= n;
    out.deta /= n;
    out.assa /= n;
    out.detre /= n;
    out.detpr /= n;
    out.assre /= n;
    out.asspr /= n;
    out.mota = mota(gt, pred);
    out.idf1 = idf1(gt, pred);
    return out;
}

}  // namespace trackref::metrics
