#include "amodal/core/mask.hpp"

#include <algorithm>

namespace amodal {

namespace {

void require_same_dims(const BinaryMask& a, const BinaryMask& b, const char* op) {
    if (!a.same_dims(b)) {
        throw DimensionError(std::string(op) + ": mask dimension mismatch");
    }
}

}  // namespace

BinaryMask::BinaryMask(int width, int height, bool fill)
    : bits_(MaskArray::Constant(height, width, fill)) {
    if (width < 0 || height < 0) throw DimensionError("BinaryMask: negative dims");
}

BinaryMask::BinaryMask(MaskArray bits) : bits_(std::move(bits)) {}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    require_same_dims(a, b, "mask_union");
    return BinaryMask(a.array() || b.array());
}

BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b) {
    require_same_dims(a, b, "mask_intersect");
    return BinaryMask(a.array() && b.array());
}

BinaryMask mask_difference(const BinaryMask& a, const BinaryMask& b) {
    require_same_dims(a, b, "mask_difference");
    return BinaryMask(a.array() && !b.array());
}

BinaryMask mask_complement(const BinaryMask& m) {
    return BinaryMask((!m.array()).eval());
}

std::int64_t mask_area(const BinaryMask& m) {
    return m.array().count();
}

BinaryMask mask_dilate(const BinaryMask& m, int iterations) {
    if (iterations < 0) throw ContractError("mask_dilate: negative iterations");
    const int w = m.width();
    const int h = m.height();
    MaskArray cur = m.array();
    for (int it = 0; it < iterations; ++it) {
        if (cur.all()) break;  // saturated
        MaskArray next = MaskArray::Constant(h, w, false);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!cur(y, x)) continue;
                const int y0 = std::max(0, y - 2), y1 = std::min(h - 1, y + 2);
                const int x0 = std::max(0, x - 2), x1 = std::min(w - 1, x + 2);
                for (int yy = y0; yy <= y1; ++yy)
                    for (int xx = x0; xx <= x1; ++xx) next(yy, xx) = true;
            }
        }
        cur.swap(next);
    }
    return BinaryMask(std::move(cur));
}

double overlap_ratio(const BinaryMask& cluster, const BinaryMask& reference) {
    require_same_dims(cluster, reference, "overlap_ratio");
    const std::int64_t denom = mask_area(cluster);
    if (denom == 0) throw ContractError("overlap_ratio: empty cluster");
    const std::int64_t inter = (cluster.array() && reference.array()).count();
    return static_cast<double>(inter) / static_cast<double>(denom);
}

std::set<Side> touches_boundary(const BinaryMask& m, int eps) {
    std::set<Side> sides;
    const int w = m.width();
    const int h = m.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            if (x < eps) sides.insert(Side::left);
            if (w - 1 - x < eps) sides.insert(Side::right);
            if (y < eps) sides.insert(Side::top);
            if (h - 1 - y < eps) sides.insert(Side::bottom);
        }
        if (sides.size() == 4) break;
    }
    return sides;
}

std::optional<BBox> bbox_of_mask(const BinaryMask& m) {
    int minx = m.width(), miny = m.height(), maxx = -1, maxy = -1;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m.at(x, y)) continue;
            minx = std::min(minx, x);
            miny = std::min(miny, y);
            maxx = std::max(maxx, x);
            maxy = std::max(maxy, y);
        }
    }
    if (maxx < 0) return std::nullopt;
    return BBox{minx, miny, maxx + 1, maxy + 1};
}

bool mask_subset(const BinaryMask& a, const BinaryMask& b) {
    require_same_dims(a, b, "mask_subset");
    return (!a.array() || b.array()).all();
}

BinaryMask mask_crop(const BinaryMask& m, const BBox& box) {
    if (!box.valid() || box.x0 < 0 || box.y0 < 0 || box.x1 > m.width() ||
        box.y1 > m.height()) {
        throw DimensionError("mask_crop: box out of raster");
    }
    MaskArray out = m.array().block(box.y0, box.x0, box.height(), box.width());
    return BinaryMask(std::move(out));
}

BinaryMask mask_pad(const BinaryMask& m, int left, int right, int top, int bottom,
                    bool fill) {
    if (left < 0 || right < 0 || top < 0 || bottom < 0) {
        throw ContractError("mask_pad: negative padding");
    }
    BinaryMask out(m.width() + left + right, m.height() + top + bottom, fill);
    out.array().block(top, left, m.height(), m.width()) = m.array();
    return out;
}

void mask_paste(BinaryMask& dst, const BinaryMask& src, int x, int y) {
    if (x < 0 || y < 0 || x + src.width() > dst.width() ||
        y + src.height() > dst.height()) {
        throw DimensionError("mask_paste: source does not fit");
    }
    dst.array().block(y, x, src.height(), src.width()) = src.array();
}

}  // namespace amodal
