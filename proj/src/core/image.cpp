#include "amodal/core/image.hpp"

namespace amodal {

ImageBuffer::ImageBuffer(int width, int height, Rgb fill) {
    if (width < 0 || height < 0) throw DimensionError("ImageBuffer: negative dims");
    planes_[0] = PlaneU8::Constant(height, width, fill.r);
    planes_[1] = PlaneU8::Constant(height, width, fill.g);
    planes_[2] = PlaneU8::Constant(height, width, fill.b);
}

bool operator==(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_dims(b)) return false;
    for (int c = 0; c < 3; ++c) {
        if (!(a.planes_[c] == b.planes_[c]).all()) return false;
    }
    return true;
}

ImageBuffer image_crop(const ImageBuffer& img, const BBox& box) {
    if (!box.valid() || box.x0 < 0 || box.y0 < 0 || box.x1 > img.width() ||
        box.y1 > img.height()) {
        throw DimensionError("image_crop: box out of raster");
    }
    ImageBuffer out(box.width(), box.height());
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = img.plane(c).block(box.y0, box.x0, box.height(), box.width());
    }
    return out;
}

ImageBuffer image_pad(const ImageBuffer& img, int left, int right, int top,
                      int bottom, Rgb fill) {
    if (left < 0 || right < 0 || top < 0 || bottom < 0) {
        throw ContractError("image_pad: negative padding");
    }
    ImageBuffer out(img.width() + left + right, img.height() + top + bottom, fill);
    for (int c = 0; c < 3; ++c) {
        out.plane(c).block(top, left, img.height(), img.width()) = img.plane(c);
    }
    return out;
}

void image_paste(ImageBuffer& dst, const ImageBuffer& src, int x, int y) {
    if (x < 0 || y < 0 || x + src.width() > dst.width() ||
        y + src.height() > dst.height()) {
        throw DimensionError("image_paste: source does not fit");
    }
    for (int c = 0; c < 3; ++c) {
        dst.plane(c).block(y, x, src.height(), src.width()) = src.plane(c);
    }
}

ImageBuffer image_blend(const ImageBuffer& keep, const ImageBuffer& replace,
                        const BinaryMask& use_replace) {
    if (!keep.same_dims(replace) || !keep.same_dims(use_replace)) {
        throw DimensionError("image_blend: dimension mismatch");
    }
    ImageBuffer out(keep.width(), keep.height());
    for (int c = 0; c < 3; ++c) {
        out.plane(c) = use_replace.array().select(replace.plane(c), keep.plane(c));
    }
    return out;
}

std::int64_t image_diff_count(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_dims(b)) throw DimensionError("image_diff_count: dimension mismatch");
    MaskArray diff = (a.plane(0) != b.plane(0)) || (a.plane(1) != b.plane(1)) ||
                     (a.plane(2) != b.plane(2));
    return diff.count();
}

}  // namespace amodal
