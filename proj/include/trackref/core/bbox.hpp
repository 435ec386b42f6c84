#pragma once

#include <array>
#include <cmath>

namespace trackref {

// Axis-aligned box in pixel space, stored top-left (x, y, w, h) to match the
// MOT file grammar. Filters operate on the center form (cx, cy, aspect, h)
// with aspect = w / h; the two forms convert losslessly.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool valid() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
               std::isfinite(h) && w > 0.0 && h > 0.0;
    }

    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }
    double area() const { return w * h; }

    // (cx, cy, aspect, h)
    std::array<double, 4> to_center() const {
        return {x + w / 2.0, y + h / 2.0, w / h, h};
    }

    static BBox from_center(const std::array<double, 4>& z) {
        const double w = z[2] * z[3];
        const double h = z[3];
        return BBox{z[0] - w / 2.0, z[1] - h / 2.0, w, h};
    }
};

inline bool operator==(const BBox& a, const BBox& b) {
    return a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
}

// Intersection over union of two valid boxes, in [0, 1].
double iou(const BBox& a, const BBox& b);

}  // namespace trackref
