#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "amodal/core/image.hpp"
#include "amodal/core/mask.hpp"

namespace amodal {

// Images serialize as RGB PNG, masks as single-channel PNG with 0/255.

ImageBuffer read_image_png(const std::string& path);
void write_image_png(const ImageBuffer& img, const std::string& path);

BinaryMask read_mask_png(const std::string& path);
void write_mask_png(const BinaryMask& mask, const std::string& path);

// In-memory codecs for the wire protocol.
std::vector<std::uint8_t> encode_image_png(const ImageBuffer& img);
ImageBuffer decode_image_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_mask_png(const BinaryMask& mask);
BinaryMask decode_mask_png(const std::vector<std::uint8_t>& bytes);

/// Label grid as an 8-bit indexed PNG with a fixed palette (debug traces).
using LabelGrid = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
void write_indexed_png(const LabelGrid& labels, const std::string& path);

}  // namespace amodal
