#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include <trackref/core/bbox.hpp>
#include <trackref/nn/tensor.hpp>

namespace trackref::refer {

// Visual feature map of one stream: [T, S, C_v] with S = H*W (global) or
// h*w (local), stored row-major.
struct FeatureMap {
    enum class Kind { Global, Local };
    Kind kind = Kind::Local;
    nn::Tensor values;

    int frames() const { return values.shape()[0]; }
    int positions() const { return values.shape()[1]; }
    int channels() const { return values.shape()[2]; }
    nn::Tensor frame(int t) const;  // [S, C_v]
};

struct TextFeature {
    nn::Tensor token_features;  // [L, C_t]
    nn::Tensor pooled;          // [C], filled by the textual head
};

// On-disk feature records, one JSON object per line:
//   {frame, track, kind: global|local|text, shape, data [, box]}
// global: per frame, track 0; local: per (frame, source track) with the
// source box; text: frame 0, track = description id.
class FeatureStore {
public:
    struct LocalRecord {
        int track = 0;
        BBox box;
        nn::Tensor values;  // [S_l, C_v]
    };

    std::map<int, nn::Tensor> global;                 // frame -> [S_g, C_v]
    std::map<int, std::vector<LocalRecord>> local;    // frame -> records
    std::map<int, nn::Tensor> text;                   // desc id -> [L, C_t]

    static FeatureStore load_dir(const std::filesystem::path& dir);
    static FeatureStore load_file(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;

    bool has_frame(int frame) const { return global.count(frame) && local.count(frame); }

    // Local features for an arbitrary query box: the stored record with
    // maximal IoU >= gate, else a deterministic low-magnitude clutter
    // tensor (what an encoder would see in an empty crop).
    nn::Tensor local_for_box(int frame, const BBox& box, double gate, int s_l, int c_v) const;
};

}  // namespace trackref::refer
