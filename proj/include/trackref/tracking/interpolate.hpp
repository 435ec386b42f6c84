#pragma once

#include <trackref/core/types.hpp>

namespace trackref::tracking {

// Fills every frame gap g with 2 <= g <= max_gap by per-coordinate linear
// interpolation of (x, y, w, h); larger gaps and observed entries are left
// untouched. max_gap <= 1 returns the tracklet unchanged.
Tracklet interpolate(const Tracklet& t, int max_gap);

std::vector<Tracklet> interpolate(const std::vector<Tracklet>& tracks, int max_gap);

}  // namespace trackref::tracking
