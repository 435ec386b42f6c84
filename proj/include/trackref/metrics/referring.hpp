#pragma once

#include <map>
#include <optional>
#include <vector>

#include <trackref/metrics/evaluate.hpp>

namespace trackref::metrics {

struct ReferringOptions {
    // Tracklets with (calibrated) aggregate score above this pass the filter.
    double score_threshold = 0.0;
    // When false, frames where a description matches no object are dropped
    // instead of counting predictions there as false positives.
    bool fp_on_empty_frames = true;
    // Optional per-frame gating: (track id, frame) -> score. When present,
    // individual frames pass the filter instead of whole tracklets.
    std::optional<std::map<std::pair<int, int>, double>> frame_scores;
};

struct ReferringResult {
    EvalResult mean;  // unweighted mean over scored descriptions
    std::vector<std::pair<int, EvalResult>> per_desc;
    std::vector<int> skipped_descs;  // descriptions without any positive
};

// Restricts ground truth to each description's positives and predictions to
// tracklets (or frames) passing the score filter, evaluates every
// description separately and averages.
ReferringResult evaluate_referring(const std::vector<Tracklet>& gt,
                                   const std::vector<DescriptionRecord>& descs,
                                   const std::vector<Tracklet>& pred, const ScoreTable& scores,
                                   const ReferringOptions& opt = {});

}  // namespace trackref::metrics
