#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <set>

#include "amodal/core/error.hpp"
#include "amodal/core/geometry.hpp"

namespace amodal {

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// H x W boolean raster. Row-major, indexed (x, y) with the shared
/// top-left / y-down convention. All-false is a legal (empty) mask.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);
    explicit BinaryMask(MaskArray bits);

    int width() const { return static_cast<int>(bits_.cols()); }
    int height() const { return static_cast<int>(bits_.rows()); }

    bool at(int x, int y) const { return bits_(y, x); }
    void set(int x, int y, bool v) { bits_(y, x) = v; }

    MaskArray& array() { return bits_; }
    const MaskArray& array() const { return bits_; }

    bool same_dims(const BinaryMask& other) const {
        return width() == other.width() && height() == other.height();
    }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
        return a.same_dims(b) && (a.bits_ == b.bits_).all();
    }

private:
    MaskArray bits_;
};

// Boolean algebra on co-dimensioned masks. Dimension mismatch throws.
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_difference(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_complement(const BinaryMask& m);

std::int64_t mask_area(const BinaryMask& m);

/// Morphological dilation with the fixed 5x5 all-ones kernel.
/// iterations = 0 is the identity.
BinaryMask mask_dilate(const BinaryMask& m, int iterations);

/// |cluster ∩ reference| / |cluster|. Empty cluster is an error.
double overlap_ratio(const BinaryMask& cluster, const BinaryMask& reference);

/// Sides with some true pixel at distance < eps from that side.
std::set<Side> touches_boundary(const BinaryMask& m, int eps);

/// Tight bounding box of the true pixels; nullopt for an empty mask.
std::optional<BBox> bbox_of_mask(const BinaryMask& m);

/// True iff every true pixel of a is also true in b.
bool mask_subset(const BinaryMask& a, const BinaryMask& b);

BinaryMask mask_crop(const BinaryMask& m, const BBox& box);

/// Pad with `fill` on each side.
BinaryMask mask_pad(const BinaryMask& m, int left, int right, int top, int bottom,
                    bool fill);

/// Write src into dst at (x, y); src must fit.
void mask_paste(BinaryMask& dst, const BinaryMask& src, int x, int y);

}  // namespace amodal
