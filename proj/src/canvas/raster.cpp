// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include <fmt/format.h>

#include "drawspace/canvas.hpp"
#include "drawspace/error.hpp"
#include "drawspace/hash.hpp"

namespace drawspace {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidDimension: return "invalid-dimension";
        case ErrorCode::DegenerateGeometry: return "degenerate-geometry";
        case ErrorCode::InsufficientPoints: return "insufficient-points";
        case ErrorCode::Decode: return "decode";
        case ErrorCode::Encode: return "encode";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::AmbiguousResponse: return "ambiguous-response";
        case ErrorCode::UnparseableAnswer: return "unparseable-answer";
        case ErrorCode::InvalidConfig: return "invalid-config";
        case ErrorCode::Policy: return "policy";
        case ErrorCode::GroupTooSmall: return "group-too-small";
        case ErrorCode::Shape: return "shape";
        case ErrorCode::Alignment: return "alignment";
        case ErrorCode::InvalidSize: return "invalid-size";
        case ErrorCode::Io: return "io";
        case ErrorCode::Load: return "load";
        case ErrorCode::Join: return "join";
        case ErrorCode::InsufficientAttempts: return "insufficient-attempts";
    }
    return "unknown";
}

namespace canvas {

namespace {

void check_dimensions(int width, int height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidDimension,
                    fmt::format("image dimensions must be positive, got {}x{}", width, height));
    }
}

}  // namespace

RasterImage::RasterImage(int width, int height, Rgba fill) : width_(width), height_(height) {
    check_dimensions(width, height);
    pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 4);
    for (std::size_t i = 0; i < pixels_.size(); i += 4) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
        pixels_[i + 3] = fill.a;
    }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dimensions(width, height);
    const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 4;
    if (pixels_.size() != expected) {
        throw Error(ErrorCode::InvalidDimension,
                    fmt::format("pixel buffer holds {} bytes, {}x{} RGBA needs {}",
                                pixels_.size(), width, height, expected));
    }
}

Rgba RasterImage::at(int x, int y) const {
    if (!contains(x, y)) {
        throw std::out_of_range(fmt::format("pixel ({}, {}) outside {}x{}", x, y, width_, height_));
    }
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)) * 4;
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2], pixels_[i + 3]};
}

void RasterImage::set(int x, int y, Rgba c) {
    if (!contains(x, y)) return;
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)) * 4;
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
    pixels_[i + 3] = c.a;
}

void RasterImage::fill_rect(int x0, int y0, int x1, int y1, Rgba c) {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, width_);
    y1 = std::min(y1, height_);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) set(x, y, c);
    }
}

std::uint64_t RasterImage::content_hash() const noexcept {
    const std::uint8_t dims[8] = {
        static_cast<std::uint8_t>(width_), static_cast<std::uint8_t>(width_ >> 8),
        static_cast<std::uint8_t>(width_ >> 16), static_cast<std::uint8_t>(width_ >> 24),
        static_cast<std::uint8_t>(height_), static_cast<std::uint8_t>(height_ >> 8),
        static_cast<std::uint8_t>(height_ >> 16), static_cast<std::uint8_t>(height_ >> 24)};
    return fnv1a64(pixels_, fnv1a64(dims));
}

RasterImage new_canvas(int width, int height, Rgba fill) { return RasterImage(width, height, fill); }

}  // namespace canvas
}  // namespace drawspace
