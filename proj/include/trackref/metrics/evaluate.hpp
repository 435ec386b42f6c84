#pragma once

#include <vector>

#include <trackref/metrics/matching.hpp>

namespace trackref::metrics {

struct ThresholdCounts {
    double alpha = 0.0;
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long idsw = 0;  // filled for the MOTA threshold only
};

struct EvalResult {
    double hota = 0.0, deta = 0.0, assa = 0.0;
    double detre = 0.0, detpr = 0.0, assre = 0.0, asspr = 0.0;
    double mota = 0.0, idf1 = 0.0;
    std::vector<ThresholdCounts> counts;
};

// CLEAR-MOT accuracy at IoU threshold alpha. Identity switches are counted
// between consecutive frames where the ground-truth object is matched in
// both. Throws DataError when the ground truth is empty.
double mota(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred,
            double alpha = 0.5);

// Identity F1: global trajectory matching by per-frame overlap counts.
double idf1(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred,
            double alpha = 0.5);

// HOTA decomposition averaged over the alpha grid 0.05:0.05:0.95, plus MOTA
// and IDF1 at 0.5.
EvalResult evaluate(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred);

// Single-threshold HOTA components; exposed for hand-computed checks.
struct HotaAtAlpha {
    double hota = 0.0, deta = 0.0, assa = 0.0;
    double detre = 0.0, detpr = 0.0, assre = 0.0, asspr = 0.0;
    long tp = 0, fp = 0, fn = 0;
};
HotaAtAlpha hota_at(const std::vector<Tracklet>& gt, const std::vector<Tracklet>& pred,
                    double alpha);

}  // namespace trackref::metrics
