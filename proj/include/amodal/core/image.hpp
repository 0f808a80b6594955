#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "amodal/core/error.hpp"
#include "amodal/core/geometry.hpp"
#include "amodal/core/mask.hpp"

namespace amodal {

using PlaneU8 = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb& a, const Rgb& b) {
        return a.r == b.r && a.g == b.g && a.b == b.b;
    }
};

/// H x W x 3 pixel raster, 8-bit per channel, stored as three Eigen planes.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, Rgb fill = {0, 0, 0});

    int width() const { return static_cast<int>(planes_[0].cols()); }
    int height() const { return static_cast<int>(planes_[0].rows()); }

    Rgb at(int x, int y) const {
        return {planes_[0](y, x), planes_[1](y, x), planes_[2](y, x)};
    }
    void set(int x, int y, Rgb v) {
        planes_[0](y, x) = v.r;
        planes_[1](y, x) = v.g;
        planes_[2](y, x) = v.b;
    }

    PlaneU8& plane(int c) { return planes_[c]; }
    const PlaneU8& plane(int c) const { return planes_[c]; }

    bool same_dims(const ImageBuffer& other) const {
        return width() == other.width() && height() == other.height();
    }
    bool same_dims(const BinaryMask& m) const {
        return width() == m.width() && height() == m.height();
    }

    friend bool operator==(const ImageBuffer& a, const ImageBuffer& b);

private:
    std::array<PlaneU8, 3> planes_;
};

ImageBuffer image_crop(const ImageBuffer& img, const BBox& box);
ImageBuffer image_pad(const ImageBuffer& img, int left, int right, int top,
                      int bottom, Rgb fill);
void image_paste(ImageBuffer& dst, const ImageBuffer& src, int x, int y);

/// dst = src where mask, dst elsewhere.
ImageBuffer image_blend(const ImageBuffer& keep, const ImageBuffer& replace,
                        const BinaryMask& use_replace);

/// Count of pixels differing in any channel.
std::int64_t image_diff_count(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace amodal
