#include "amodal/io/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace amodal {

namespace {

struct MemReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos = 0;
};

void mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
    if (r->pos + len > r->size) png_error(png, "png: truncated stream");
    std::memcpy(out, r->data + r->pos, len);
    r->pos += len;
}

void mem_write(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void mem_flush(png_structp) {}

// Decodes any supported PNG into 8-bit RGB rows.
std::vector<std::vector<std::uint8_t>> decode_rgb_rows(MemReader& reader, int& w,
                                                       int& h) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             nullptr, nullptr);
    if (!png) throw std::runtime_error("png: read struct alloc failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("png: info struct alloc failed");
    }
    std::vector<std::vector<std::uint8_t>> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png: decode failed");
    }
    png_set_read_fn(png, &reader, mem_read);
    png_read_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    rows.assign(static_cast<std::size_t>(h),
                std::vector<std::uint8_t>(static_cast<std::size_t>(w) * 3));
    std::vector<png_bytep> ptrs(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) ptrs[y] = rows[y].data();
    png_read_image(png, ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return rows;
}

std::vector<std::uint8_t> encode_rows(int w, int h, int color_type,
                                      const std::vector<png_bytep>& rows,
                                      const std::vector<png_color>* palette) {
    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    if (!png) throw std::runtime_error("png: write struct alloc failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png: info struct alloc failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png: encode failed");
    }
    png_set_write_fn(png, &out, mem_write, mem_flush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h),
                 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    if (palette) {
        png_set_PLTE(png, info, const_cast<png_color*>(palette->data()),
                     static_cast<int>(palette->size()));
    }
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytep*>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fseek(f, 0, SEEK_END);
    const long size = std::ftell(f);
    std::fseek(f, 0, SEEK_SET);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(size));
    if (size > 0 && std::fread(data.data(), 1, data.size(), f) != data.size()) {
        std::fclose(f);
        throw std::runtime_error("short read on " + path);
    }
    std::fclose(f);
    return data;
}

void write_file(const std::vector<std::uint8_t>& data, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    if (!data.empty() && std::fwrite(data.data(), 1, data.size(), f) != data.size()) {
        std::fclose(f);
        throw std::runtime_error("short write on " + path);
    }
    std::fclose(f);
}

}  // namespace

std::vector<std::uint8_t> encode_image_png(const ImageBuffer& img) {
    const int w = img.width();
    const int h = img.height();
    std::vector<std::vector<std::uint8_t>> rows(
        static_cast<std::size_t>(h), std::vector<std::uint8_t>(static_cast<std::size_t>(w) * 3));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Rgb px = img.at(x, y);
            rows[y][3 * x + 0] = px.r;
            rows[y][3 * x + 1] = px.g;
            rows[y][3 * x + 2] = px.b;
        }
    }
    std::vector<png_bytep> ptrs(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) ptrs[y] = rows[y].data();
    return encode_rows(w, h, PNG_COLOR_TYPE_RGB, ptrs, nullptr);
}

ImageBuffer decode_image_png(const std::vector<std::uint8_t>& bytes) {
    MemReader reader{bytes.data(), bytes.size()};
    int w = 0, h = 0;
    const auto rows = decode_rgb_rows(reader, w, h);
    ImageBuffer img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.set(x, y, {rows[y][3 * x], rows[y][3 * x + 1], rows[y][3 * x + 2]});
        }
    }
    return img;
}

ImageBuffer read_image_png(const std::string& path) {
    return decode_image_png(read_file(path));
}

void write_image_png(const ImageBuffer& img, const std::string& path) {
    write_file(encode_image_png(img), path);
}

std::vector<std::uint8_t> encode_mask_png(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::vector<std::uint8_t>> rows(
        static_cast<std::size_t>(h), std::vector<std::uint8_t>(static_cast<std::size_t>(w)));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) rows[y][x] = mask.at(x, y) ? 255 : 0;
    }
    std::vector<png_bytep> ptrs(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) ptrs[y] = rows[y].data();
    return encode_rows(w, h, PNG_COLOR_TYPE_GRAY, ptrs, nullptr);
}

BinaryMask decode_mask_png(const std::vector<std::uint8_t>& bytes) {
    // Reuse the RGB decode; thresholding at 128 maps 0/255 back to booleans.
    MemReader reader{bytes.data(), bytes.size()};
    int w = 0, h = 0;
    const auto rows = decode_rgb_rows(reader, w, h);
    BinaryMask mask(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) mask.set(x, y, rows[y][3 * x] >= 128);
    }
    return mask;
}

BinaryMask read_mask_png(const std::string& path) {
    return decode_mask_png(read_file(path));
}

void write_mask_png(const BinaryMask& mask, const std::string& path) {
    write_file(encode_mask_png(mask), path);
}

void write_indexed_png(const LabelGrid& labels, const std::string& path) {
    const int w = static_cast<int>(labels.cols());
    const int h = static_cast<int>(labels.rows());
    // Fixed 16-entry palette cycled over label values.
    static const png_color kPalette[16] = {
        {0, 0, 0},       {230, 25, 75},   {60, 180, 75},   {255, 225, 25},
        {0, 130, 200},   {245, 130, 48},  {145, 30, 180},  {70, 240, 240},
        {240, 50, 230},  {210, 245, 60},  {250, 190, 190}, {0, 128, 128},
        {170, 110, 40},  {128, 128, 0},   {128, 0, 128},   {128, 128, 128}};
    std::vector<png_color> palette(kPalette, kPalette + 16);
    std::vector<std::vector<std::uint8_t>> rows(
        static_cast<std::size_t>(h), std::vector<std::uint8_t>(static_cast<std::size_t>(w)));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) rows[y][x] = labels(y, x) % 16;
    }
    std::vector<png_bytep> ptrs(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) ptrs[y] = rows[y].data();
    write_file(encode_rows(w, h, PNG_COLOR_TYPE_PALETTE, ptrs, &palette), path);
}

}  // namespace amodal
