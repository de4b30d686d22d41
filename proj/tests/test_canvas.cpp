// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "drawspace/canvas.hpp"
#include "drawspace/error.hpp"
#include "drawspace/hash.hpp"
#include "drawspace/maze.hpp"
#include "drawspace/random.hpp"

using namespace drawspace;
using namespace drawspace::canvas;

namespace {

bool all_pixels(const RasterImage& img, Rgba c) {
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (img.at(x, y) != c) return false;
    return true;
}

int changed_outside(const RasterImage& before, const RasterImage& after, const PixelRect& keep) {
    int n = 0;
    for (int y = 0; y < before.height(); ++y)
        for (int x = 0; x < before.width(); ++x)
            if (!keep.contains(x, y) && before.at(x, y) != after.at(x, y)) ++n;
    return n;
}

RasterImage noise(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 4);
    for (auto& b : px) b = static_cast<std::uint8_t>(rng.below(256));
    return RasterImage(w, h, std::move(px));
}

}  // namespace

TEST_CASE("new_canvas fills every pixel") {
    const auto a = new_canvas(2, 2, colors::white);
    CHECK(a.bytes().size() == 16);
    CHECK(all_pixels(a, colors::white));
    const auto b = new_canvas(1, 1, colors::black);
    CHECK(b.at(0, 0) == colors::black);

    const auto g = new_canvas(640, 480, colors::gray);
    CHECK(g.bytes().size() == 640u * 480u * 4u);
    CHECK(all_pixels(g, colors::gray));
    CHECK(g.content_hash() == 0x547e28c50e1824c4ULL);
}

TEST_CASE("new_canvas rejects empty dimensions") {
    for (auto [w, h] : {std::pair{0, 1}, {1, 0}, {-3, 4}}) {
        try {
            (void)new_canvas(w, h, colors::white);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidDimension);
        }
    }
    CHECK_THROWS_AS(RasterImage(2, 2, std::vector<std::uint8_t>(15)), Error);
}

TEST_CASE("draw_bbox strokes edges and leaves the rest alone") {
    const auto white = new_canvas(100, 100, colors::white);
    const DrawStyle style{colors::red, 2};
    const auto out = draw_bbox(white, {10, 10, 50, 50}, "", style);
    for (int i = 10; i < 50; ++i) {
        CHECK(out.at(i, 10) == colors::red);
        CHECK(out.at(i, 49) == colors::red);
        CHECK(out.at(10, i) == colors::red);
        CHECK(out.at(49, i) == colors::red);
        CHECK(out.at(i, 11) == colors::red);
    }
    CHECK(out.at(30, 30) == colors::white);
    CHECK(out.at(70, 70) == colors::white);
    CHECK(all_pixels(white, colors::white));
    CHECK(changed_outside(white, out, {10, 10, 50, 50}) == 0);
    CHECK(draw_bbox(white, {10, 10, 50, 50}, "", style) == out);
}

TEST_CASE("draw_bbox label tag is placed adjacent to the box") {
    const auto white = new_canvas(100, 100, colors::white);
    const auto out = draw_bbox(white, {30, 40, 60, 70}, "cup", {colors::blue, 2});
    const auto tag = label_rect("cup", 30, 40, 100, 100);
    CHECK_FALSE(tag.empty());
    CHECK(tag.y1 == 40);
    CHECK(tag.x0 == 30);
    PixelRect box{30, 40, 60, 70};
    int changed_in_tag = 0;
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x) {
            const bool changed = white.at(x, y) != out.at(x, y);
            if (tag.contains(x, y)) changed_in_tag += changed;
            else if (!box.contains(x, y)) CHECK_FALSE(changed);
        }
    CHECK(changed_in_tag > 0);

    // No room above: the tag drops to the anchor row and stays inside.
    const auto low = label_rect("a long label here", 95, 0, 100, 100);
    CHECK(low.y0 == 0);
    CHECK(low.x1 <= 100);
    CHECK(low.x0 >= 0);
}

TEST_CASE("draw_bbox clamps and rejects degenerate boxes") {
    const auto img = new_canvas(20, 20, colors::white);
    const auto r = clamp_box({-5, -5, 10, 30}, 20, 20);
    CHECK(r.x0 == 0);
    CHECK(r.y0 == 0);
    CHECK(r.x1 == 10);
    CHECK(r.y1 == 20);
    const auto swapped = clamp_box({10, 12, 2, 4}, 20, 20);
    CHECK(swapped.x0 == 2);
    CHECK(swapped.y1 == 12);
    for (BBoxGeometry bad : {BBoxGeometry{5, 5, 5, 9}, BBoxGeometry{1, 3, 8, 3},
                             BBoxGeometry{30, 30, 40, 40}, BBoxGeometry{-9, 0, -1, 5}}) {
        try {
            (void)draw_bbox(img, bad, "x", {});
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DegenerateGeometry);
        }
    }
    CHECK_THROWS_AS(draw_bbox(img, {0, 0, 5, 5}, "", {colors::red, 0}), Error);
}

TEST_CASE("draw_polyline horizontal line touches only its row band") {
    const auto img = new_canvas(50, 30, colors::white);
    const auto out = draw_polyline(img, {{{5, 10}, {40, 10}}}, "", {colors::green, 1});
    for (int x = 5; x <= 40; ++x) CHECK(out.at(x, 10) == colors::green);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 50; ++x)
            if (y != 10 || x < 5 || x > 40) CHECK(out.at(x, y) == colors::white);
}

TEST_CASE("draw_polyline staircase snapshot and closed square") {
    const PolylineGeometry stairs{{{10, 90}, {30, 90}, {30, 60}, {60, 60}, {60, 20}}};
    const auto white = new_canvas(100, 100, colors::white);
    const auto out = draw_polyline(white, stairs, "stairs", {colors::blue, 2});
    CHECK(out.content_hash() == 0xa1341f00ff92477dULL);
    CHECK(draw_polyline(white, stairs, "stairs", {colors::blue, 2}) == out);

    const PolylineGeometry square{{{10, 10}, {40, 10}, {40, 40}, {10, 40}, {10, 10}}};
    CHECK_NOTHROW((void)draw_polyline(white, square, "sq", {}));
}

TEST_CASE("draw_polyline needs two finite points") {
    const auto img = new_canvas(10, 10, colors::white);
    try {
        (void)draw_polyline(img, {{{1, 1}}}, "", {});
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientPoints);
    }
    CHECK_THROWS_AS(draw_polyline(img, {{{1, 1}, {std::nan(""), 2}}}, "", {}), Error);
    // Out-of-range points clamp onto the border.
    const auto pts = clamp_polyline({{{-10, 5}, {50, 5}}}, 10, 10);
    CHECK(pts.front() == std::pair{0, 5});
    CHECK(pts.back() == std::pair{9, 5});
}

TEST_CASE("overlay locality on random geometry") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int w = static_cast<int>(rng.between(20, 120));
        const int h = static_cast<int>(rng.between(20, 120));
        const auto img = noise(w, h, rng.next());
        const int sw = static_cast<int>(rng.between(1, 4));
        const std::string label = trial % 3 == 0 ? "" : "lbl" + std::to_string(trial);
        std::vector<Point> pts;
        const int n = static_cast<int>(rng.between(2, 5));
        for (int i = 0; i < n; ++i) pts.push_back({rng.unit() * w, rng.unit() * h});
        const auto out = draw_polyline(img, {pts}, label, {colors::red, sw});
        const auto clamped = clamp_polyline({pts}, w, h);
        const auto tag = label_rect(label, clamped.back().first, clamped.back().second, w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (img.at(x, y) == out.at(x, y) || tag.contains(x, y)) continue;
                // Changed pixel must lie within the stroke band of some segment.
                bool near = false;
                for (std::size_t i = 0; i + 1 < clamped.size() && !near; ++i) {
                    const auto [ax, ay] = clamped[i];
                    const auto [bx, by] = clamped[i + 1];
                    const int steps = std::max(std::abs(bx - ax), std::abs(by - ay));
                    for (int s = 0; s <= steps && !near; ++s) {
                        const double t = steps == 0 ? 0.0 : static_cast<double>(s) / steps;
                        const double px = ax + t * (bx - ax);
                        const double py = ay + t * (by - ay);
                        near = std::max(std::abs(px - x), std::abs(py - y)) <= sw + 1;
                    }
                }
                CHECK(near);
            }
    }
}

TEST_CASE("drawing never mutates its input") {
    const auto img = noise(40, 40, 5);
    const auto copy = img;
    (void)draw_bbox(img, {1, 1, 30, 30}, "box", {});
    (void)draw_polyline(img, {{{0, 0}, {39, 39}}}, "diag", {});
    CHECK(img == copy);
}

TEST_CASE("label colour is stable under label normalization") {
    CHECK(label_color("Red  Cup") == label_color(" red cup "));
    CHECK(label_color("a").a == 255);
}

TEST_CASE("maze render with a box around one cell is pinned") {
    const auto m = maze::render_maze(maze::gen_maze(4, 11));
    const auto c = maze::cell_center({1, 2});
    const auto out = draw_bbox(m, {c.x - 30, c.y - 30, c.x + 30, c.y + 30}, "cell",
                               {label_color("cell"), 2});
    CHECK(out.content_hash() == 0x669a27551bfbfff5ULL);
    CHECK(decode_png(encode_png(out)) == out);
}

TEST_CASE("png round trip and failure modes") {
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const auto img = noise(static_cast<int>(rng.between(1, 50)), static_cast<int>(rng.between(1, 50)), rng.next());
        CHECK(decode_png(encode_png(img)) == img);
    }
    const auto bytes = encode_png(noise(16, 16, 1));
    const std::span<const std::uint8_t> half(bytes.data(), bytes.size() / 2);
    try {
        (void)decode_png(half);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Decode);
    }
    const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(decode_png(junk), Error);
}

TEST_CASE("png length of a seeded noise image is stable") {
    Rng r(1234);
    std::vector<std::uint8_t> px(64 * 48 * 4);
    for (auto& b : px) b = static_cast<std::uint8_t>(r.below(256));
    const RasterImage img(64, 48, px);
    CHECK(encode_png(img).size() == 12429);
    CHECK(encode_png(img) == encode_png(img));
}

TEST_CASE("text rendering handles non-printable bytes") {
    auto img = new_canvas(40, 10, colors::white);
    draw_text(img, 0, 0, "a\x01", colors::black);
    auto q = new_canvas(40, 10, colors::white);
    draw_text(q, 0, 0, "a?", colors::black);
    CHECK(img == q);
    CHECK(text_width("abc") == 3 * kGlyphWidth - 1);
    CHECK(text_width("") == 0);
}
