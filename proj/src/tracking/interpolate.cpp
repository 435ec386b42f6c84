#include <trackref/tracking/interpolate.hpp>

namespace trackref::tracking {

Tracklet interpolate(const Tracklet& t, int max_gap) {
    if (max_gap <= 1 || t.entries.size() < 2) return t;
    Tracklet out;
    out.track_id = t.track_id;
    for (size_t i = 0; i + 1 < t.entries.size(); ++i) {
        const auto& [f0, b0] = t.entries[i];
        const auto& [f1, b1] = t.entries[i + 1];
        out.entries.emplace_back(f0, b0);
        const int gap = f1 - f0;
        if (gap < 2 || gap > max_gap) continue;
        for (int f = f0 + 1; f < f1; ++f) {
            const double a = static_cast<double>(f - f0) / gap;
            out.entries.emplace_back(f, BBox{b0.x + a * (b1.x - b0.x), b0.y + a * (b1.y - b0.y),
                                             b0.w + a * (b1.w - b0.w), b0.h + a * (b1.h - b0.h)});
        }
    }
    out.entries.push_back(t.entries.back());
    return out;
}

std::vector<Tracklet> interpolate(const std::vector<Tracklet>& tracks, int max_gap) {
    std::vector<Tracklet> out;
    out.reserve(tracks.size());
    for (const Tracklet& t : tracks) out.push_back(interpolate(t, max_gap));
    return out;
}

}  // namespace trackref::tracking
