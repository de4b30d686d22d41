// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <unistd.h>

#include "doctest.h"

#include "drawspace/error.hpp"
#include "drawspace/hash.hpp"
#include "drawspace/maze.hpp"
#include "drawspace/reward.hpp"
#include "drawspace/trace_io.hpp"

using namespace drawspace;
using namespace drawspace::maze;
namespace fs = std::filesystem;

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

// Walks the moves on the rendered picture: a move is legal when the wall
// band between the two cell centres is not black.
std::optional<Cell> walk_on_image(const canvas::RasterImage& img, int g, Cell at,
                                  const std::vector<std::string>& moves) {
    for (const auto& m : moves) {
        Cell next = at;
        if (m == "up") --next.row;
        else if (m == "down") ++next.row;
        else if (m == "left") --next.col;
        else if (m == "right") ++next.col;
        else return std::nullopt;
        if (next.row < 0 || next.col < 0 || next.row >= g || next.col >= g) return std::nullopt;
        const int cx = at.col * 64 + 34;
        const int cy = at.row * 64 + 34;
        int bx = cx;
        int by = cy;
        if (next.col != at.col) bx = std::max(at.col, next.col) * 64 + 1;
        if (next.row != at.row) by = std::max(at.row, next.row) * 64 + 1;
        if (img.at(bx, by) == canvas::colors::black) return std::nullopt;
        at = next;
    }
    return at;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("drawspace_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("grid size bounds") {
    for (int g : {2, 7, 0, -1}) {
        try {
            (void)gen_maze(g, 1);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidSize);
        }
    }
}

TEST_CASE("3x3 maze has 8 passages and is deterministic") {
    const auto a = gen_maze(3, 42);
    CHECK(a.passages().size() == 8);
    CHECK(gen_maze(3, 42).passages() == a.passages());
}

TEST_CASE("1000 mazes are spanning trees") {
    for (int i = 0; i < 1000; ++i) {
        const int g = 3 + i % 4;
        const auto m = gen_maze(g, derive_seed(5, i));
        const auto passages = m.passages();
        REQUIRE(static_cast<int>(passages.size()) == g * g - 1);
        UnionFind uf(g * g);
        for (const auto& [a, b] : passages) {
            CHECK(std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1);
            CHECK(uf.unite(a.row * g + a.col, b.row * g + b.col));  // acyclic
        }
        std::set<int> roots;
        for (int c = 0; c < g * g; ++c) roots.insert(uf.find(c));
        CHECK(roots.size() == 1);
    }
}

TEST_CASE("explicit one-move task") {
    auto m = gen_maze(3, 9);
    // Find any open move from the start.
    std::optional<Move> mv;
    for (auto d : {Move::Up, Move::Down, Move::Left, Move::Right}) {
        if (m.can_move(m.start(), d)) mv = d;
    }
    REQUIRE(mv);
    const Cell end = step(m.start(), *mv);
    std::vector<Cell> others;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (Cell{r, c} != end && Cell{r, c} != m.start()) others.push_back({r, c});
    const auto t = make_task(m, {*mv}, {end, others[0], others[1], others[2]});
    CHECK(t.answer == 'A');
    CHECK_THROWS_AS(make_task(m, {*mv}, {others[0], others[1], others[2], others[3]}), Error);
}

TEST_CASE("generated walks replay on the image") {
    for (int i = 0; i < 400; ++i) {
        const int g = 3 + i % 4;
        const auto seed = derive_seed(77, i);
        const auto t = gen_task(gen_maze(g, seed), seed);
        CHECK(t.actions.size() >= 2);
        CHECK(static_cast<int>(t.actions.size()) <= 2 * g);
        const auto& cands = t.maze.candidates();
        REQUIRE(cands.size() == 4);
        CHECK(std::set<Cell>(cands.begin(), cands.end()).size() == 4);
        for (const auto& c : cands) CHECK(c != t.maze.start());

        std::vector<std::string> moves;
        for (auto m : t.actions) moves.emplace_back(to_string(m));
        const auto end = walk_on_image(render_maze(t.maze), g, t.maze.start(), moves);
        REQUIRE(end);
        CHECK(*end == cands[t.answer - 'A']);
        CHECK(t.options == std::vector<std::string>{"point A", "point B", "point C", "point D"});
        CHECK(t.question.find("Go " + moves[0] + ".") != std::string::npos);
    }
}

TEST_CASE("answer letters are close to uniform") {
    std::array<int, 4> counts{};
    for (int i = 0; i < 2000; ++i) {
        const auto seed = derive_seed(31337, i);
        ++counts[gen_task(gen_maze(3 + i % 4, seed), seed).answer - 'A'];
    }
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - 500.0) * (c - 500.0) / 500.0;
    // 3 degrees of freedom, p = 0.001.
    CHECK(chi2 < 16.27);
}

TEST_CASE("render marks start and is pinned") {
    const auto m = gen_maze(4, 11);
    const auto img = render_maze(m);
    CHECK(img.width() == image_side(4));
    CHECK(img.width() == 4 * 64 + 4);
    const auto c = cell_center(m.start());
    CHECK(img.at(static_cast<int>(c.x), static_cast<int>(c.y)) == canvas::colors::green);
    CHECK(img.content_hash() == 0xd19a9494bdf7e5acULL);
    CHECK(render_maze(gen_maze(4, 12)).content_hash() != img.content_hash());
}

TEST_CASE("oracle policy traces the ground-truth walk") {
    for (int i = 0; i < 40; ++i) {
        const int g = 3 + i % 4;
        const auto seed = derive_seed(8, i);
        const auto mt = gen_task(gen_maze(g, seed), seed);
        const auto task = to_task(mt, "m" + std::to_string(i));
        auto policy = oracle_policy(mt);
        const auto tr = episode::run_episode(*policy, task, {});
        REQUIRE(tr.termination == episode::Termination::Answered);
        REQUIRE(tr.steps.size() == mt.actions.size() + 1);
        CHECK(tr.steps.size() >= 3);
        Cell at = mt.maze.start();
        for (std::size_t s = 0; s < mt.actions.size(); ++s) {
            REQUIRE(tr.steps[s].ops.size() == 1);
            const auto& op = tr.steps[s].ops[0].op;
            CHECK(op.kind() == dsl::OpKind::Line);
            CHECK(op.image_index == static_cast<int>(s) + 1);
            const Cell next = step(at, mt.actions[s]);
            const auto& pts = std::get<canvas::PolylineGeometry>(op.geometry).points;
            REQUIRE(pts.size() == 2);
            CHECK(pts[0] == cell_center(at));
            CHECK(pts[1] == cell_center(next));
            at = next;
        }
        CHECK(tr.final_answer->choice == mt.answer);
        CHECK(reward::total_reward(tr, task).total == 2.0);
    }
}

TEST_CASE("record round trip") {
    const auto mt = gen_task(gen_maze(5, 3), 3);
    const auto task = to_task(mt, "x");
    auto record = task.metadata;
    record["answer"] = task.answer;
    const auto back = task_from_record(record);
    CHECK(back.actions == mt.actions);
    record["answer"] = mt.answer == 'A' ? "B" : "A";
    CHECK_THROWS_AS(task_from_record(record), Error);
}

TEST_CASE("emit_dataset is deterministic and self-checked") {
    const std::map<int, int> counts{{3, 10}, {4, 10}, {5, 10}, {6, 10}};
    const auto a = scratch("a");
    const auto b = scratch("b");
    const auto ma = emit_dataset(counts, 7, a, 1);
    const auto mb = emit_dataset(counts, 7, b, 4);
    CHECK(ma.records == 40);
    CHECK(ma.self_checked == 40);
    CHECK(ma.dataset_digest == mb.dataset_digest);
    CHECK(slurp(a / "dataset.jsonl") == slurp(b / "dataset.jsonl"));
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));

    const auto rows = episode::read_jsonl(a / "dataset.jsonl");
    std::map<int, int> hist;
    for (const auto& r : rows) {
        ++hist[r.at("grid_size").get<int>()];
        CHECK(slurp(a / r.at("image_path").get<std::string>()) == slurp(b / r.at("image_path").get<std::string>()));
        CHECK(r.at("oracle_trace").at("reward").at("total") == 2.0);
        for (const char* key : {"id", "seed", "question", "options", "answer", "actions"}) CHECK(r.contains(key));
    }
    CHECK(hist == counts);
    CHECK(emit_dataset(counts, 8, scratch("c"), 1).dataset_digest != ma.dataset_digest);
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(scratch("c"));
}
