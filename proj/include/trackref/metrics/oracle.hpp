#pragma once

#include <vector>

#include <trackref/core/types.hpp>

namespace trackref::metrics {

// Oracle revision protocol: every predicted box matched to ground truth at
// IoU >= alpha has its coordinates replaced by the matched ground-truth box.
// No boxes are added or deleted and no ids change.
std::vector<Tracklet> oracle_revise(const std::vector<Tracklet>& pred,
                                    const std::vector<Tracklet>& gt, double alpha = 0.5);

}  // namespace trackref::metrics
