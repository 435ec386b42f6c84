#pragma once

#include <map>
#include <vector>

#include <trackref/core/types.hpp>

namespace trackref::metrics {

struct FrameBoxes {
    std::vector<int> ids;
    std::vector<BBox> boxes;
};

// frame -> (track id, box) lists, frames ascending
using SequenceIndex = std::map<int, FrameBoxes>;

SequenceIndex index_tracklets(const std::vector<Tracklet>& tracks);

// Maximum-cardinality matching among pairs with IoU >= alpha; among those,
// total IoU is maximal. Returns (gt index, pred index) pairs.
std::vector<std::pair<int, int>> match_frame(const std::vector<BBox>& gt,
                                             const std::vector<BBox>& pred, double alpha);

}  // namespace trackref::metrics
