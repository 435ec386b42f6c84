#pragma once

#include <filesystem>
#include <vector>

#include <trackref/core/types.hpp>

namespace trackref {

// MOT record grammar, one record per line:
//   frame,id,x,y,w,h,score,class,visibility
// frame: integer >= 1; id: integer >= 1 for tracks, -1 for raw detections;
// x,y,w,h,score,visibility: decimal reals; class: integer. Lines are
// LF-terminated and reals use the shortest round-trip decimal form.

std::vector<Detection> read_mot_detections(const std::filesystem::path& file);

// Groups equal ids and sorts each group by frame. A repeated (frame, id)
// pair with id >= 1 is a duplicate-record error.
std::vector<Tracklet> read_mot_tracklets(const std::filesystem::path& file);

void write_mot(const std::vector<Detection>& dets, const std::filesystem::path& file);
void write_mot(const std::vector<Tracklet>& tracks, const std::filesystem::path& file);

// Validation shared with the writers; throws DataError on violations.
void validate(const Detection& det);
void validate(const Tracklet& t);

}  // namespace trackref
