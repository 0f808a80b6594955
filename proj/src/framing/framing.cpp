#include "amodal/framing/framing.hpp"

#include <nlohmann/json.hpp>

namespace amodal {

namespace {
constexpr Rgb kPadWhite{255, 255, 255};
}

nlohmann::json FrameTransform::to_json() const {
    return nlohmann::json{
        {"pad", {{"left", pad_left}, {"right", pad_right}, {"top", pad_top}, {"bottom", pad_bottom}}},
        {"crop", {{"x0", crop.x0}, {"y0", crop.y0}, {"x1", crop.x1}, {"y1", crop.y1}}},
        {"original", {{"w", original_w}, {"h", original_h}}},
        {"framed", {{"w", framed_w}, {"h", framed_h}}}};
}

PaddedInputs conditional_pad(const ImageBuffer& image, const BinaryMask& occ_mask,
                             const BinaryMask& modal, const std::set<Side>& sides,
                             const PipelineConfig& config) {
    if (!image.same_dims(occ_mask) || !image.same_dims(modal)) {
        throw DimensionError("conditional_pad: dims mismatch");
    }
    const int pad = config.pad_alpha + config.pad_beta;
    const int l = sides.count(Side::left) ? pad : 0;
    const int r = sides.count(Side::right) ? pad : 0;
    const int t = sides.count(Side::top) ? pad : 0;
    const int b = sides.count(Side::bottom) ? pad : 0;

    PaddedInputs out;
    out.image = image_pad(image, l, r, t, b, kPadWhite);
    out.occ_mask = mask_pad(occ_mask, l, r, t, b, /*fill=*/true);
    out.modal = mask_pad(modal, l, r, t, b, /*fill=*/false);
    out.transform.pad_left = l;
    out.transform.pad_right = r;
    out.transform.pad_top = t;
    out.transform.pad_bottom = b;
    out.transform.original_w = image.width();
    out.transform.original_h = image.height();
    return out;
}

FramedInputs square_crop(const PaddedInputs& padded, bool boundary_touched,
                         const PipelineConfig& config) {
    const auto bbox = bbox_of_mask(padded.modal);
    if (!bbox) throw ContractError("square_crop: empty modal mask");

    const int margin = config.pad_alpha + (boundary_touched ? config.pad_beta : 0);
    BBox box = bbox->expanded(margin);

    // Grow the shorter axis symmetrically to a square.
    if (box.width() < box.height()) {
        const int extra = box.height() - box.width();
        box.x0 -= extra / 2;
        box.x1 += extra - extra / 2;
    } else if (box.height() < box.width()) {
        const int extra = box.width() - box.height();
        box.y0 -= extra / 2;
        box.y1 += extra - extra / 2;
    }
    box = box.clamped(padded.image.width(), padded.image.height());

    FramedInputs out;
    out.image = image_crop(padded.image, box);
    out.occ_mask = mask_crop(padded.occ_mask, box);
    out.modal = mask_crop(padded.modal, box);
    out.transform = padded.transform;
    out.transform.crop = box;
    out.transform.framed_w = box.width();
    out.transform.framed_h = box.height();
    return out;
}

ImageBuffer uncrop_overlay(const ImageBuffer& completed, const BinaryMask& amodal,
                           const FrameTransform& t, const ImageBuffer& original) {
    if (completed.width() != t.framed_w || completed.height() != t.framed_h ||
        !completed.same_dims(amodal)) {
        throw DimensionError("uncrop_overlay: framed dims mismatch");
    }
    if (original.width() != t.original_w || original.height() != t.original_h) {
        throw DimensionError("uncrop_overlay: original dims mismatch");
    }

    // Extension = how far the object reaches into the padding, per side.
    int ext_l = 0, ext_r = 0, ext_t = 0, ext_b = 0;
    for (int y = 0; y < amodal.height(); ++y) {
        for (int x = 0; x < amodal.width(); ++x) {
            if (!amodal.at(x, y)) continue;
            const auto [px, py] = t.framed_to_padded(x, y);
            const auto [ox, oy] = t.padded_to_original(px, py);
            ext_l = std::max(ext_l, -ox);
            ext_t = std::max(ext_t, -oy);
            ext_r = std::max(ext_r, ox + 1 - original.width());
            ext_b = std::max(ext_b, oy + 1 - original.height());
        }
    }

    ImageBuffer canvas = image_pad(original, ext_l, ext_r, ext_t, ext_b, kPadWhite);
    for (int y = 0; y < amodal.height(); ++y) {
        for (int x = 0; x < amodal.width(); ++x) {
            if (!amodal.at(x, y)) continue;
            const auto [px, py] = t.framed_to_padded(x, y);
            const auto [ox, oy] = t.padded_to_original(px, py);
            canvas.set(ox + ext_l, oy + ext_t, completed.at(x, y));
        }
    }
    return canvas;
}

}  // namespace amodal
