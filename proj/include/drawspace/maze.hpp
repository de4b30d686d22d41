// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "drawspace/canvas.hpp"
#include "drawspace/episode.hpp"
#include "drawspace/task.hpp"

namespace drawspace::maze {

inline constexpr int kMinGrid = 3;
inline constexpr int kMaxGrid = 6;
inline constexpr int kCellPixels = 64;
inline constexpr int kWallPixels = 4;
inline constexpr int kCandidates = 4;

enum class Move { Up, Down, Left, Right };

std::string_view to_string(Move m) noexcept;
Move move_from_string(std::string_view text);

struct Cell {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Perfect maze on a size x size grid, plus the start cell and (once a
/// task is attached) the four lettered candidate cells.
class MazeSpec {
public:
    MazeSpec(int size, std::uint64_t seed);

    [[nodiscard]] int size() const noexcept { return size_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] Cell start() const noexcept { return start_; }
    [[nodiscard]] const std::vector<Cell>& candidates() const noexcept { return candidates_; }

    [[nodiscard]] bool in_bounds(Cell c) const noexcept {
        return c.row >= 0 && c.col >= 0 && c.row < size_ && c.col < size_;
    }
    /// True when moving from `c` in direction `m` crosses no wall.
    [[nodiscard]] bool can_move(Cell c, Move m) const;
    /// Unordered open passages, each listed once with the smaller cell first.
    [[nodiscard]] std::vector<std::pair<Cell, Cell>> passages() const;

    void open(Cell c, Move m);
    void set_start(Cell c) { start_ = c; }
    void set_candidates(std::vector<Cell> cells) { candidates_ = std::move(cells); }

private:
    [[nodiscard]] std::size_t idx(Cell c) const {
        return static_cast<std::size_t>(c.row * size_ + c.col);
    }

    int size_;
    std::uint64_t seed_;
    std::vector<std::uint8_t> open_;
    Cell start_;
    std::vector<Cell> candidates_;
};

/// Cell reached by moving once; no wall check.
Cell step(Cell c, Move m) noexcept;

struct MazeTask {
    MazeSpec maze;
    std::vector<Move> actions;
    char answer = 'A';
    std::string question;
    std::vector<std::string> options;
};

/// Randomized depth-first search carving; start cell chosen uniformly.
/// Throws Error{InvalidSize} unless 3 <= size <= 6.
MazeSpec gen_maze(int size, std::uint64_t seed);

/// Random wall-legal walk of 2..2*size moves from the start, ending off
/// the start; its endpoint gets a uniformly drawn letter and three
/// distractors fill the other letters at distinct free cells.
MazeTask gen_task(const MazeSpec& maze, std::uint64_t seed);

/// Task from explicit actions and candidate cells (A..D in order). Throws
/// Error{InvalidConfig} when the walk is illegal or its endpoint is not
/// exactly one candidate.
MazeTask make_task(const MazeSpec& maze, std::vector<Move> actions,
                   std::array<Cell, kCandidates> candidates);

std::string question_text(std::span<const Move> actions);

/// Pixel centre of a cell in the rendered image.
canvas::Point cell_center(Cell c) noexcept;
[[nodiscard]] int image_side(int size) noexcept;

/// White floor, black walls, green start disc, lettered candidates.
canvas::RasterImage render_maze(const MazeSpec& maze);

/// Deterministic policy replaying the ground-truth walk one move per step
/// as a labelled line on the latest image, then answering.
std::shared_ptr<episode::PolicyPort> oracle_policy(const MazeTask& task);

/// The reply the oracle gives at a 0-based turn.
std::string oracle_reply(const MazeTask& task, int turn, int latest_image);

/// Rebuilds the task from a dataset record's grid_size and seed and checks
/// it against the stored actions and answer.
MazeTask task_from_record(const nlohmann::json& record);

/// Generic task view (question, options, answer, image) of a maze task.
Task to_task(const MazeTask& task, std::string id);

struct DatasetManifest {
    std::uint64_t seed = 0;
    std::map<int, int> counts;
    std::size_t records = 0;
    std::string dataset_file;
    std::string dataset_digest;
    std::size_t self_checked = 0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Writes dataset.jsonl, images/*.png and manifest.json under `out_dir`.
/// Output bytes depend only on (counts, seed). Every oracle trace is
/// re-scored and must reach the maximum reward.
DatasetManifest emit_dataset(const std::map<int, int>& counts, std::uint64_t seed,
                             const std::filesystem::path& out_dir, int parallel = 1);

}  // namespace drawspace::maze
