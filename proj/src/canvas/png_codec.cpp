// SPDX-License-Identifier: Apache-2.0
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <png.h>

#include "drawspace/canvas.hpp"
#include "drawspace/error.hpp"

namespace drawspace::canvas {

namespace {

struct ImageGuard {
    png_image& image;
    ~ImageGuard() { png_image_free(&image); }
};

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_RGBA;
    ImageGuard guard{image};

    png_alloc_size_t size = 0;
    const auto* pixels = img.bytes().data();
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr)) {
        throw Error(ErrorCode::Encode, fmt::format("png sizing failed: {}", image.message));
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
        throw Error(ErrorCode::Encode, fmt::format("png encode failed: {}", image.message));
    }
    out.resize(size);
    return out;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    ImageGuard guard{image};

    if (bytes.empty() ||
        !png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::Decode, fmt::format("not a readable png: {}", image.message));
    }
    if (image.width == 0 || image.height == 0 || image.width > 1u << 15 ||
        image.height > 1u << 15) {
        throw Error(ErrorCode::Decode,
                    fmt::format("png dimensions {}x{} out of range", image.width, image.height));
    }
    image.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        throw Error(ErrorCode::Decode, fmt::format("png decode failed: {}", image.message));
    }
    return RasterImage(static_cast<int>(image.width), static_cast<int>(image.height),
                       std::move(pixels));
}

RasterImage read_png(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path));
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

void write_png(const RasterImage& img, const std::string& path) {
    const auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, fmt::format("short write to {}", path));
}

}  // namespace drawspace::canvas
