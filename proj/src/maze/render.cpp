// SPDX-License-Identifier: Apache-2.0
#include "drawspace/maze.hpp"

namespace drawspace::maze {

namespace {

constexpr canvas::Rgba kStartColor = canvas::colors::green;
constexpr canvas::Rgba kLetterColor{30, 60, 200, 255};
constexpr int kStartRadius = 14;
constexpr int kLetterScale = 3;

void disc(canvas::RasterImage& img, int cx, int cy, int radius, canvas::Rgba color) {
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx * dx + dy * dy <= radius * radius) img.set(cx + dx, cy + dy, color);
        }
    }
}

}  // namespace

int image_side(int size) noexcept { return size * kCellPixels + kWallPixels; }

canvas::Point cell_center(Cell c) noexcept {
    const int half = kCellPixels / 2 + kWallPixels / 2;
    return {static_cast<double>(c.col * kCellPixels + half),
            static_cast<double>(c.row * kCellPixels + half)};
}

canvas::RasterImage render_maze(const MazeSpec& maze) {
    const int side = image_side(maze.size());
    auto img = canvas::new_canvas(side, side, canvas::colors::white);
    const auto wall = canvas::colors::black;
    for (int r = 0; r < maze.size(); ++r) {
        for (int c = 0; c < maze.size(); ++c) {
            const Cell cell{r, c};
            const int x = c * kCellPixels;
            const int y = r * kCellPixels;
            const int far = kCellPixels + kWallPixels;
            if (!maze.can_move(cell, Move::Up)) img.fill_rect(x, y, x + far, y + kWallPixels, wall);
            if (!maze.can_move(cell, Move::Down)) {
                img.fill_rect(x, y + kCellPixels, x + far, y + far, wall);
            }
            if (!maze.can_move(cell, Move::Left)) img.fill_rect(x, y, x + kWallPixels, y + far, wall);
            if (!maze.can_move(cell, Move::Right)) {
                img.fill_rect(x + kCellPixels, y, x + far, y + far, wall);
            }
        }
    }

    const auto start = cell_center(maze.start());
    disc(img, static_cast<int>(start.x), static_cast<int>(start.y), kStartRadius, kStartColor);

    const int glyph_w = canvas::text_width("A", kLetterScale);
    const int glyph_h = 7 * kLetterScale;
    for (std::size_t i = 0; i < maze.candidates().size(); ++i) {
        const auto center = cell_center(maze.candidates()[i]);
        const char letter[2] = {static_cast<char>('A' + i), '\0'};
        canvas::draw_text(img, static_cast<int>(center.x) - glyph_w / 2,
                          static_cast<int>(center.y) - glyph_h / 2, letter, kLetterColor,
                          kLetterScale);
    }
    return img;
}

}  // namespace drawspace::maze
