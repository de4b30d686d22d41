// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "drawspace/canvas.hpp"
#include "drawspace/error.hpp"
#include "drawspace/hash.hpp"
#include "drawspace/label.hpp"

namespace drawspace::canvas {

namespace {

constexpr int kTagPadding = 2;

constexpr std::array<Rgba, 10> kPalette = {{
    {230, 25, 75, 255},
    {60, 180, 75, 255},
    {0, 130, 200, 255},
    {245, 130, 48, 255},
    {145, 30, 180, 255},
    {70, 200, 200, 255},
    {240, 50, 230, 255},
    {128, 128, 0, 255},
    {0, 0, 128, 255},
    {170, 110, 40, 255},
}};

int round_clamped(double v, int lo, int hi) {
    const double clamped = std::clamp(v, static_cast<double>(lo), static_cast<double>(hi));
    return static_cast<int>(std::floor(clamped + 0.5));
}

void check_style(const DrawStyle& style) {
    if (style.stroke_width < 1) {
        throw Error(ErrorCode::InvalidConfig,
                    fmt::format("stroke width must be >= 1, got {}", style.stroke_width));
    }
}

std::string tag_text(std::string_view label) {
    auto first = label.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = label.find_last_not_of(" \t\r\n");
    std::string text(label.substr(first, last - first + 1));
    if (text.size() > kMaxLabelChars) text.resize(kMaxLabelChars);
    for (auto& ch : text) {
        if (ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
    }
    return text;
}

Rgba contrast_ink(Rgba background) {
    const int luma = 299 * background.r + 587 * background.g + 114 * background.b;
    return luma > 140000 ? colors::black : colors::white;
}

void draw_tag(RasterImage& img, std::string_view label, int anchor_x, int anchor_y, Rgba fill) {
    const PixelRect rect = label_rect(label, anchor_x, anchor_y, img.width(), img.height());
    if (rect.empty()) return;
    img.fill_rect(rect.x0, rect.y0, rect.x1, rect.y1, fill);
    draw_text(img, rect.x0 + kTagPadding, rect.y0 + kTagPadding, tag_text(label),
              contrast_ink(fill));
}

void stamp(RasterImage& img, int cx, int cy, int w, Rgba c) {
    const int off = (w - 1) / 2;
    img.fill_rect(cx - off, cy - off, cx - off + w, cy - off + w, c);
}

void stroke_segment(RasterImage& img, std::pair<int, int> a, std::pair<int, int> b, int w,
                    Rgba c) {
    auto [x0, y0] = a;
    const auto [x1, y1] = b;
    const int dx = std::abs(x1 - x0);
    const int sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0);
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        stamp(img, x0, y0, w, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

}  // namespace

PixelRect clamp_box(const BBoxGeometry& box, int width, int height) {
    if (!std::isfinite(box.x1) || !std::isfinite(box.y1) || !std::isfinite(box.x2) ||
        !std::isfinite(box.y2)) {
        throw Error(ErrorCode::DegenerateGeometry, "box coordinates must be finite");
    }
    PixelRect r{round_clamped(std::min(box.x1, box.x2), 0, width),
                round_clamped(std::min(box.y1, box.y2), 0, height),
                round_clamped(std::max(box.x1, box.x2), 0, width),
                round_clamped(std::max(box.y1, box.y2), 0, height)};
    if (r.empty()) {
        throw Error(ErrorCode::DegenerateGeometry,
                    fmt::format("box ({}, {}, {}, {}) has no area inside {}x{}", box.x1, box.y1,
                                box.x2, box.y2, width, height));
    }
    return r;
}

std::vector<std::pair<int, int>> clamp_polyline(const PolylineGeometry& line, int width,
                                                int height) {
    if (line.points.size() < 2) {
        throw Error(ErrorCode::InsufficientPoints,
                    fmt::format("polyline needs at least 2 points, got {}", line.points.size()));
    }
    std::vector<std::pair<int, int>> out;
    out.reserve(line.points.size());
    for (const auto& p : line.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(ErrorCode::DegenerateGeometry, "polyline points must be finite");
        }
        out.emplace_back(round_clamped(p.x, 0, width - 1), round_clamped(p.y, 0, height - 1));
    }
    return out;
}

PixelRect label_rect(std::string_view label, int anchor_x, int anchor_y, int width,
                     int height) {
    const std::string text = tag_text(label);
    if (text.empty()) return {};
    const int tw = text_width(text) + 2 * kTagPadding;
    const int th = 7 + 2 * kTagPadding;
    int x = std::max(0, std::min(anchor_x, width - tw));
    int y = anchor_y - th >= 0 ? anchor_y - th : anchor_y;
    PixelRect r{x, y, std::min(x + tw, width), std::min(y + th, height)};
    r.y0 = std::max(r.y0, 0);
    return r;
}

RasterImage draw_bbox(const RasterImage& img, const BBoxGeometry& box, std::string_view label,
                      const DrawStyle& style) {
    check_style(style);
    const PixelRect r = clamp_box(box, img.width(), img.height());
    RasterImage out = img;
    const int w = style.stroke_width;
    out.fill_rect(r.x0, r.y0, r.x1, std::min(r.y0 + w, r.y1), style.stroke);
    out.fill_rect(r.x0, std::max(r.y1 - w, r.y0), r.x1, r.y1, style.stroke);
    out.fill_rect(r.x0, r.y0, std::min(r.x0 + w, r.x1), r.y1, style.stroke);
    out.fill_rect(std::max(r.x1 - w, r.x0), r.y0, r.x1, r.y1, style.stroke);
    draw_tag(out, label, r.x0, r.y0, style.stroke);
    return out;
}

RasterImage draw_polyline(const RasterImage& img, const PolylineGeometry& line,
                          std::string_view label, const DrawStyle& style) {
    check_style(style);
    const auto pts = clamp_polyline(line, img.width(), img.height());
    RasterImage out = img;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        stroke_segment(out, pts[i - 1], pts[i], style.stroke_width, style.stroke);
    }
    draw_tag(out, label, pts.back().first, pts.back().second, style.stroke);
    return out;
}

Rgba label_color(std::string_view label) {
    return kPalette[fnv1a64(normalize_label(label)) % kPalette.size()];
}

}  // namespace drawspace::canvas
