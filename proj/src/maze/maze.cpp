// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include <fmt/format.h>

#include "drawspace/error.hpp"
#include "drawspace/hash.hpp"
#include "drawspace/maze.hpp"
#include "drawspace/random.hpp"

namespace drawspace::maze {

namespace {

constexpr std::array<Move, 4> kMoves = {Move::Up, Move::Down, Move::Left, Move::Right};
constexpr std::uint64_t kMazeStream = 0x6d617a652d6d617aULL;
constexpr std::uint64_t kTaskStream = 0x7461736b2d746173ULL;
constexpr int kMaxTaskAttempts = 1000;

std::uint8_t bit(Move m) noexcept { return static_cast<std::uint8_t>(1u << static_cast<int>(m)); }

Move opposite(Move m) noexcept {
    switch (m) {
        case Move::Up: return Move::Down;
        case Move::Down: return Move::Up;
        case Move::Left: return Move::Right;
        case Move::Right: return Move::Left;
    }
    return Move::Up;
}

}  // namespace

std::string_view to_string(Move m) noexcept {
    switch (m) {
        case Move::Up: return "up";
        case Move::Down: return "down";
        case Move::Left: return "left";
        case Move::Right: return "right";
    }
    return "up";
}

Move move_from_string(std::string_view text) {
    for (auto m : kMoves) {
        if (to_string(m) == text) return m;
    }
    throw Error(ErrorCode::Parse, fmt::format("unknown move '{}'", text));
}

Cell step(Cell c, Move m) noexcept {
    switch (m) {
        case Move::Up: return {c.row - 1, c.col};
        case Move::Down: return {c.row + 1, c.col};
        case Move::Left: return {c.row, c.col - 1};
        case Move::Right: return {c.row, c.col + 1};
    }
    return c;
}

MazeSpec::MazeSpec(int size, std::uint64_t seed)
    : size_(size), seed_(seed), open_(static_cast<std::size_t>(size * size), 0) {
    if (size < kMinGrid || size > kMaxGrid) {
        throw Error(ErrorCode::InvalidSize,
                    fmt::format("grid size must be in [{}, {}], got {}", kMinGrid, kMaxGrid, size));
    }
}

bool MazeSpec::can_move(Cell c, Move m) const {
    if (!in_bounds(c) || !in_bounds(step(c, m))) return false;
    return (open_[idx(c)] & bit(m)) != 0;
}

void MazeSpec::open(Cell c, Move m) {
    const Cell n = step(c, m);
    if (!in_bounds(c) || !in_bounds(n)) {
        throw std::out_of_range("passage leaves the grid");
    }
    open_[idx(c)] |= bit(m);
    open_[idx(n)] |= bit(opposite(m));
}

std::vector<std::pair<Cell, Cell>> MazeSpec::passages() const {
    std::vector<std::pair<Cell, Cell>> out;
    for (int r = 0; r < size_; ++r) {
        for (int c = 0; c < size_; ++c) {
            const Cell cell{r, c};
            if (can_move(cell, Move::Right)) out.emplace_back(cell, step(cell, Move::Right));
            if (can_move(cell, Move::Down)) out.emplace_back(cell, step(cell, Move::Down));
        }
    }
    return out;
}

MazeSpec gen_maze(int size, std::uint64_t seed) {
    MazeSpec maze(size, seed);
    Rng rng(splitmix64(seed ^ kMazeStream));
    const auto cells = static_cast<std::uint64_t>(size * size);
    auto cell_of = [size](std::uint64_t i) {
        return Cell{static_cast<int>(i) / size, static_cast<int>(i) % size};
    };

    std::vector<bool> visited(cells, false);
    std::vector<Cell> stack{cell_of(rng.below(cells))};
    visited[static_cast<std::size_t>(stack.back().row * size + stack.back().col)] = true;
    while (!stack.empty()) {
        const Cell cur = stack.back();
        std::vector<Move> fresh;
        for (auto m : kMoves) {
            const Cell n = step(cur, m);
            if (maze.in_bounds(n) && !visited[static_cast<std::size_t>(n.row * size + n.col)]) {
                fresh.push_back(m);
            }
        }
        if (fresh.empty()) {
            stack.pop_back();
            continue;
        }
        const Move m = fresh[rng.below(fresh.size())];
        const Cell n = step(cur, m);
        maze.open(cur, m);
        visited[static_cast<std::size_t>(n.row * size + n.col)] = true;
        stack.push_back(n);
    }
    maze.set_start(cell_of(rng.below(cells)));
    return maze;
}

std::string question_text(std::span<const Move> actions) {
    std::string seq;
    for (auto m : actions) {
        if (!seq.empty()) seq += ' ';
        seq += fmt::format("Go {}.", to_string(m));
    }
    return fmt::format(
        "Determine the final destination from the starting point (green point). "
        "Action Sequence: {} Which labeled destination is reached?",
        seq);
}

MazeTask make_task(const MazeSpec& maze, std::vector<Move> actions,
                   std::array<Cell, kCandidates> candidates) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!maze.in_bounds(candidates[i]) || candidates[i] == maze.start()) {
            throw Error(ErrorCode::InvalidConfig,
                        fmt::format("candidate {} is off the grid or on the start",
                                    static_cast<char>('A' + i)));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (candidates[i] == candidates[j]) {
                throw Error(ErrorCode::InvalidConfig, "candidate cells must be distinct");
            }
        }
    }
    if (actions.empty()) throw Error(ErrorCode::InvalidConfig, "action sequence is empty");
    Cell cur = maze.start();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (!maze.can_move(cur, actions[i])) {
            throw Error(ErrorCode::InvalidConfig,
                        fmt::format("move {} ({}) hits a wall", i + 1, to_string(actions[i])));
        }
        cur = step(cur, actions[i]);
    }
    const auto hit = std::find(candidates.begin(), candidates.end(), cur);
    if (hit == candidates.end()) {
        throw Error(ErrorCode::InvalidConfig, "walk does not end on a candidate");
    }

    MazeSpec labelled = maze;
    labelled.set_candidates({candidates.begin(), candidates.end()});
    MazeTask task{std::move(labelled), std::move(actions),
                  static_cast<char>('A' + (hit - candidates.begin())), {}, {}};
    task.question = question_text(task.actions);
    for (int i = 0; i < kCandidates; ++i) {
        task.options.push_back(fmt::format("point {}", static_cast<char>('A' + i)));
    }
    return task;
}

MazeTask gen_task(const MazeSpec& maze, std::uint64_t seed) {
    Rng rng(splitmix64(seed ^ kTaskStream));
    const int g = maze.size();
    for (int attempt = 0; attempt < kMaxTaskAttempts; ++attempt) {
        const auto length = rng.between(2, 2 * g);
        std::vector<Move> actions;
        Cell cur = maze.start();
        for (std::int64_t i = 0; i < length; ++i) {
            std::vector<Move> legal;
            for (auto m : kMoves) {
                if (maze.can_move(cur, m)) legal.push_back(m);
            }
            const Move m = legal[rng.below(legal.size())];
            actions.push_back(m);
            cur = step(cur, m);
        }
        if (cur == maze.start()) continue;

        std::vector<Cell> free;
        for (int r = 0; r < g; ++r) {
            for (int c = 0; c < g; ++c) {
                const Cell cell{r, c};
                if (cell != maze.start() && cell != cur) free.push_back(cell);
            }
        }
        const auto letter = rng.below(kCandidates);
        std::array<Cell, kCandidates> candidates{};
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (i == letter) {
                candidates[i] = cur;
                continue;
            }
            const auto pick = rng.below(free.size());
            candidates[i] = free[pick];
            free.erase(free.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        return make_task(maze, std::move(actions), candidates);
    }
    throw Error(ErrorCode::InvalidConfig, "could not draw a maze task");
}

}  // namespace drawspace::maze
