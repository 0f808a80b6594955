#pragma once

#include <nlohmann/json_fwd.hpp>
#include <set>
#include <tuple>

#include "amodal/core/image.hpp"
#include "amodal/core/mask.hpp"
#include "amodal/core/types.hpp"

namespace amodal {

/// Records how a working crop relates to the image it was cut from:
/// per-side padding applied first, then a crop box in padded coordinates.
/// Exactly invertible for every pixel inside the crop; no resampling.
struct FrameTransform {
    int pad_left = 0;
    int pad_right = 0;
    int pad_top = 0;
    int pad_bottom = 0;
    BBox crop;  // in padded coordinates
    int original_w = 0;
    int original_h = 0;
    int framed_w = 0;
    int framed_h = 0;

    // framed -> padded coordinates
    std::pair<int, int> framed_to_padded(int x, int y) const {
        return {x + crop.x0, y + crop.y0};
    }
    // padded -> original coordinates (may land outside the original raster)
    std::pair<int, int> padded_to_original(int x, int y) const {
        return {x - pad_left, y - pad_top};
    }

    nlohmann::json to_json() const;
};

struct PaddedInputs {
    ImageBuffer image;
    BinaryMask occ_mask;
    BinaryMask modal;
    FrameTransform transform;  // crop not yet set
};

/// Pad with white pixels on exactly the touched sides; padded pixels are
/// occluded-by-boundary and join the inpaint mask. Pad amount per touched
/// side is alpha + beta.
PaddedInputs conditional_pad(const ImageBuffer& image, const BinaryMask& occ_mask,
                             const BinaryMask& modal, const std::set<Side>& sides,
                             const PipelineConfig& config);

struct FramedInputs {
    ImageBuffer image;
    BinaryMask occ_mask;
    BinaryMask modal;
    FrameTransform transform;
};

/// Square zoom-crop around the modal bbox: alpha margin per side, beta more
/// when the object touched the boundary, shorter axis grown to square, then
/// clamped to the raster (possibly leaving a non-square crop).
FramedInputs square_crop(const PaddedInputs& padded, bool boundary_touched,
                         const PipelineConfig& config);

/// Write the completed object (inside `amodal`) back over the original
/// image, extending the canvas by whatever padding the object now occupies.
/// Every non-object original pixel is preserved.
ImageBuffer uncrop_overlay(const ImageBuffer& completed, const BinaryMask& amodal,
                           const FrameTransform& transform, const ImageBuffer& original);

}  // namespace amodal
