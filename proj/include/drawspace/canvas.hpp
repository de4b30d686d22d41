// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drawspace::canvas {

struct Rgba {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    std::uint8_t a = 255;

    friend bool operator==(const Rgba&, const Rgba&) = default;
};

namespace colors {
inline constexpr Rgba white{255, 255, 255, 255};
inline constexpr Rgba black{0, 0, 0, 255};
inline constexpr Rgba gray{128, 128, 128, 255};
inline constexpr Rgba red{220, 30, 30, 255};
inline constexpr Rgba green{30, 170, 60, 255};
inline constexpr Rgba blue{40, 80, 220, 255};
}  // namespace colors

/// Row-major RGBA8 image. Always at least 1x1; the buffer holds exactly
/// width * height * 4 bytes.
class RasterImage {
public:
    RasterImage(int width, int height, Rgba fill);
    RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::span<const std::uint8_t> bytes() const noexcept { return pixels_; }

    [[nodiscard]] bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }
    [[nodiscard]] Rgba at(int x, int y) const;
    void set(int x, int y, Rgba c);
    /// Fills the half-open rectangle [x0,x1) x [y0,y1), clipped to the image.
    void fill_rect(int x0, int y0, int x1, int y1, Rgba c);

    /// FNV-1a over dimensions and pixel bytes; stable golden-value key.
    [[nodiscard]] std::uint64_t content_hash() const noexcept;

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

struct Point {
    double x = 0;
    double y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in pixel units, origin top-left. Covers columns
/// [x1, x2) and rows [y1, y2) once rounded and clamped.
struct BBoxGeometry {
    double x1 = 0;
    double y1 = 0;
    double x2 = 0;
    double y2 = 0;

    friend bool operator==(const BBoxGeometry&, const BBoxGeometry&) = default;
};

struct PolylineGeometry {
    std::vector<Point> points;

    friend bool operator==(const PolylineGeometry&, const PolylineGeometry&) = default;
};

struct DrawStyle {
    Rgba stroke = colors::red;
    int stroke_width = 2;
};

/// Integer pixel rectangle, half-open.
struct PixelRect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    [[nodiscard]] bool empty() const noexcept { return x0 >= x1 || y0 >= y1; }
    [[nodiscard]] bool contains(int x, int y) const noexcept {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
    }
};

RasterImage new_canvas(int width, int height, Rgba fill);

/// Box after clamping into a width x height image. Throws
/// DegenerateGeometry when the clamped box has no area.
PixelRect clamp_box(const BBoxGeometry& box, int width, int height);
/// Polyline vertices rounded and clamped. Throws InsufficientPoints for
/// fewer than two points and DegenerateGeometry for non-finite ones.
std::vector<std::pair<int, int>> clamp_polyline(const PolylineGeometry& line, int width,
                                                int height);

/// Label tag rectangle used by draw_bbox / draw_polyline. The tag sits
/// directly above `anchor_top_left` when it fits, otherwise directly
/// below the anchor row, and is shifted left to stay inside the image.
/// Empty when the label renders to nothing.
PixelRect label_rect(std::string_view label, int anchor_x, int anchor_y, int width,
                     int height);

RasterImage draw_bbox(const RasterImage& img, const BBoxGeometry& box, std::string_view label,
                      const DrawStyle& style);
RasterImage draw_polyline(const RasterImage& img, const PolylineGeometry& line,
                          std::string_view label, const DrawStyle& style);

/// Fixed palette colour chosen from a hash of the normalized label.
Rgba label_color(std::string_view label);

/// Renders ASCII text with the embedded 5x7 font; glyph cells are
/// 6*scale wide and 8*scale tall. Non-printable bytes render as '?'.
void draw_text(RasterImage& img, int x, int y, std::string_view text, Rgba color, int scale = 1);
[[nodiscard]] int text_width(std::string_view text, int scale = 1) noexcept;
inline constexpr int kGlyphWidth = 6;
inline constexpr int kGlyphHeight = 8;
/// Longest label rendered in a tag; longer labels are truncated.
inline constexpr std::size_t kMaxLabelChars = 24;

std::vector<std::uint8_t> encode_png(const RasterImage& img);
RasterImage decode_png(std::span<const std::uint8_t> bytes);

RasterImage read_png(const std::string& path);
void write_png(const RasterImage& img, const std::string& path);

}  // namespace drawspace::canvas
