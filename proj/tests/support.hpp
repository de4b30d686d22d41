// SPDX-License-Identifier: Apache-2.0
// Generators and independent reference implementations shared by the
// unit tests and the acceptance binary.
#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "drawspace/dsl.hpp"
#include "drawspace/episode.hpp"
#include "drawspace/random.hpp"
#include "drawspace/reflect.hpp"

namespace testsupport {

using drawspace::Rng;
namespace dsl = drawspace::dsl;
namespace episode = drawspace::episode;
namespace canvas = drawspace::canvas;

inline std::string pick(Rng& rng, const std::vector<std::string>& from) {
    return from[rng.below(from.size())];
}

// Coordinates on a coarse grid so repeats and collisions are common.
inline double coord(Rng& rng, int coarse) {
    const double v = static_cast<double>(rng.below(static_cast<std::uint64_t>(coarse))) * 8.0;
    return rng.below(4) == 0 ? v + 0.5 : v;
}

inline dsl::DrawOperation random_op(Rng& rng, int max_k, int coarse = 6,
                                    const std::vector<std::string>& labels = {"cup", "Cup ", "door",
                                                                             "path", " the  PATH"}) {
    dsl::DrawOperation op;
    op.image_index = static_cast<int>(rng.between(1, max_k));
    if (rng.below(2) == 0) {
        op.geometry = canvas::BBoxGeometry{coord(rng, coarse), coord(rng, coarse),
                                           coord(rng, coarse), coord(rng, coarse)};
    } else {
        canvas::PolylineGeometry line;
        const auto n = rng.between(2, 4);
        for (std::int64_t i = 0; i < n; ++i) line.points.push_back({coord(rng, coarse), coord(rng, coarse)});
        op.geometry = line;
    }
    op.label = pick(rng, labels);
    return op;
}

// Responses on the canonical subset: trimmed thought without fence or
// answer lines, finite coordinates, non-blank labels.
inline dsl::PolicyResponse random_response(Rng& rng) {
    static const std::vector<std::string> words{"look", "at", "the", "left", "box", "again", "{", "\"q\"",
                                                "move", "2.5", "k=3", "p=1,2", "答案", "`x`"};
    static const std::vector<std::string> labels{"cup", "red chair", "path \"a\"", "back\\slash",
                                                 "tab\there", "ünï", "x y  z", "42"};
    dsl::PolicyResponse r;
    const auto lines = rng.below(4);
    for (std::uint64_t l = 0; l < lines; ++l) {
        if (l) r.thought += '\n';
        const auto n = rng.between(1, 6);
        for (std::int64_t w = 0; w < n; ++w) {
            if (w) r.thought += ' ';
            r.thought += pick(rng, words);
        }
    }
    switch (rng.below(3)) {
        case 0: {
            const auto m = rng.between(1, 4);
            for (std::int64_t i = 0; i < m; ++i) {
                auto op = random_op(rng, 9, 1000, labels);
                // Arbitrary finite doubles, including negatives and fractions.
                if (auto* box = std::get_if<canvas::BBoxGeometry>(&op.geometry)) {
                    box->x1 = (rng.unit() - 0.2) * 1e3;
                    box->y2 = rng.unit() * 1e-3;
                }
                r.ops.push_back(op);
            }
            break;
        }
        case 1:
            r.final_answer = pick(rng, {"B", "3.25", "(C) the door", "", "-1e-3 meters"});
            break;
        default:
            break;
    }
    return r;
}

inline std::string mutate(Rng& rng, std::string s) {
    static const std::vector<std::string> tokens{
        "```draw\n", "```", "\nAnswer:", "answer: A", "\"", "\\", "k=", "p=", "l=", ";", ",", "\n",
        "nan", "inf", "1e999", "-0", "box ", "line ", "k=0", "k=-1", "k=99999999999", "\r\n", "\t",
        std::string(1, '\0'), "\xff\xfe", "l=\"\\u12\""};
    const auto edits = rng.between(1, 6);
    for (std::int64_t e = 0; e < edits; ++e) {
        const auto pos = s.empty() ? 0 : rng.below(s.size() + 1);
        switch (rng.below(5)) {
            case 0:
                if (!s.empty() && pos < s.size()) s[pos] = static_cast<char>(rng.below(256));
                break;
            case 1:
                s.insert(pos, pick(rng, tokens));
                break;
            case 2:
                if (pos < s.size()) s.erase(pos, rng.between(1, 8));
                break;
            case 3:
                s.resize(pos);
                break;
            default:
                if (!s.empty()) {
                    const auto a = rng.below(s.size());
                    s.insert(pos, s.substr(a, rng.between(1, 20)));
                }
        }
    }
    return s;
}

// -- independent oracles ------------------------------------------------------

inline std::string ref_normalize(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    }
    return out;
}

inline bool ref_same_geometry(const dsl::Geometry& a, const dsl::Geometry& b) {
    if (a.index() != b.index()) return false;
    if (const auto* x = std::get_if<canvas::BBoxGeometry>(&a)) {
        const auto& y = std::get<canvas::BBoxGeometry>(b);
        return x->x1 == y.x1 && x->y1 == y.y1 && x->x2 == y.x2 && x->y2 == y.y2;
    }
    const auto& p = std::get<canvas::PolylineGeometry>(a).points;
    const auto& q = std::get<canvas::PolylineGeometry>(b).points;
    if (p.size() != q.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].x != q[i].x || p[i].y != q[i].y) return false;
    }
    return true;
}

inline bool ref_canonical_equal(const dsl::DrawOperation& a, const dsl::DrawOperation& b) {
    return a.image_index == b.image_index && ref_same_geometry(a.geometry, b.geometry) &&
           ref_normalize(a.label) == ref_normalize(b.label);
}

struct PairWitness {
    int t1, u, t2, v;
    friend bool operator==(const PairWitness&, const PairWitness&) = default;
};

// Exhaustive search over all ordered pairs, first hit in (t1, u, t2, v) order.
inline std::optional<PairWitness> brute_reflection(const episode::EpisodeTrace& tr) {
    const int T = static_cast<int>(tr.steps.size());
    for (int t1 = 0; t1 < T; ++t1)
        for (int u = 0; u < static_cast<int>(tr.steps[t1].ops.size()); ++u)
            for (int t2 = 0; t2 < T; ++t2)
                for (int v = 0; v < static_cast<int>(tr.steps[t2].ops.size()); ++v) {
                    if (t2 <= t1) continue;
                    const auto& a = tr.steps[t1].ops[u].op;
                    const auto& b = tr.steps[t2].ops[v].op;
                    if (ref_normalize(a.label) == ref_normalize(b.label) && !ref_canonical_equal(a, b)) {
                        return PairWitness{t1 + 1, u + 1, t2 + 1, v + 1};
                    }
                }
    return std::nullopt;
}

inline std::optional<PairWitness> brute_duplicate(const episode::EpisodeTrace& tr) {
    const int T = static_cast<int>(tr.steps.size());
    for (int t1 = 0; t1 < T; ++t1)
        for (int u = 0; u < static_cast<int>(tr.steps[t1].ops.size()); ++u)
            for (int t2 = 0; t2 < T; ++t2)
                for (int v = 0; v < static_cast<int>(tr.steps[t2].ops.size()); ++v) {
                    if (t2 < t1 || (t2 == t1 && v <= u)) continue;
                    if (!tr.steps[t1].ops[u].executed) continue;
                    if (ref_canonical_equal(tr.steps[t1].ops[u].op, tr.steps[t2].ops[v].op)) {
                        return PairWitness{t1 + 1, u + 1, t2 + 1, v + 1};
                    }
                }
    return std::nullopt;
}

inline episode::EpisodeTrace random_trace(Rng& rng, int max_steps = 8, int max_ops = 4) {
    episode::EpisodeTrace tr;
    tr.task_id = "t";
    const auto T = rng.between(0, max_steps);
    for (std::int64_t t = 0; t < T; ++t) {
        episode::Step step;
        const auto m = rng.between(0, max_ops);
        for (std::int64_t j = 0; j < m; ++j) {
            episode::OpRecord rec;
            rec.op = random_op(rng, 3, 3);
            rec.executed = rng.below(5) != 0;
            step.ops.push_back(rec);
        }
        tr.steps.push_back(step);
    }
    return tr;
}

// Scripted policy returning fixed replies in order, then empty text.
class Script final : public episode::PolicyPort {
public:
    explicit Script(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string next(const episode::Conversation& c) override {
        const auto t = static_cast<std::size_t>(c.assistant_turns());
        return t < replies_.size() ? replies_[t] : std::string{};
    }

private:
    std::vector<std::string> replies_;
};

}  // namespace testsupport
