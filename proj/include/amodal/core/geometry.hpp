#pragma once

#include <algorithm>
#include <cstdint>

namespace amodal {

// Half-open pixel rectangle: x in [x0, x1), y in [y0, y1).
// Origin is top-left, y grows downward.
struct BBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool valid() const { return x0 < x1 && y0 < y1; }

    bool contains(int x, int y) const {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
    }

    BBox expanded(int margin) const {
        return {x0 - margin, y0 - margin, x1 + margin, y1 + margin};
    }

    BBox clamped(int raster_w, int raster_h) const {
        return {std::max(0, x0), std::max(0, y0),
                std::min(raster_w, x1), std::min(raster_h, y1)};
    }

    friend bool operator==(const BBox& a, const BBox& b) {
        return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
    }
};

enum class Side { left, right, top, bottom };

}  // namespace amodal
