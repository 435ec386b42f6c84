#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <trackref/core/bbox.hpp>

namespace trackref {

// One detector output box. Frames are 1-based as in MOT-Challenge files.
struct Detection {
    int frame = 1;
    BBox bbox;
    double confidence = 1.0;
    int class_id = 1;
};

// One object's trajectory under a single identity: (frame, box) pairs with
// strictly increasing frames.
struct Tracklet {
    int track_id = 0;
    std::vector<std::pair<int, BBox>> entries;

    int first_frame() const { return entries.front().first; }
    int last_frame() const { return entries.back().first; }
    const BBox* box_at(int frame) const {
        for (const auto& [f, b] : entries)
            if (f == frame) return &b;
        return nullptr;
    }
};

// A referring description. `frequency` is present for training descriptions
// and absent for test descriptions until a pseudo frequency is estimated.
// `positives` maps frame -> ground-truth track ids matching the description.
struct DescriptionRecord {
    int desc_id = 0;
    std::string text;
    std::optional<double> frequency;
    std::map<int, std::set<int>> positives;

    std::vector<std::string> tokens() const;
    bool is_train() const { return frequency.has_value(); }
};

// Similarity scores of one (tracklet, description) pair: one score per
// temporal window plus their mean.
struct ScoreRow {
    int track_id = 0;
    int desc_id = 0;
    std::vector<double> window_scores;
    double aggregate_score = 0.0;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;
};

}  // namespace trackref
