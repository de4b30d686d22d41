// SPDX-License-Identifier: Apache-2.0
#include <map>

#include <fmt/format.h>

#include "drawspace/label.hpp"
#include "drawspace/reflect.hpp"

namespace drawspace::reflect {

namespace {

struct Located {
    OpRef ref;
    const episode::OpRecord* record;
};

std::vector<Located> flatten(const episode::EpisodeTrace& trace) {
    std::vector<Located> out;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const auto& ops = trace.steps[t].ops;
        for (std::size_t j = 0; j < ops.size(); ++j) {
            out.push_back({{static_cast<int>(t) + 1, static_cast<int>(j) + 1}, &ops[j]});
        }
    }
    return out;
}

// Text key that is equal exactly when dsl::canonical_equal holds; adding
// 0.0 folds -0 into +0 the way operator== on doubles does.
std::string canonical_key(const dsl::DrawOperation& op) {
    dsl::DrawOperation key{op.image_index, op.geometry, {}};
    if (auto* box = std::get_if<canvas::BBoxGeometry>(&key.geometry)) {
        box->x1 += 0.0;
        box->y1 += 0.0;
        box->x2 += 0.0;
        box->y2 += 0.0;
    } else {
        for (auto& p : std::get<canvas::PolylineGeometry>(key.geometry).points) {
            p.x += 0.0;
            p.y += 0.0;
        }
    }
    std::string out = dsl::format_op(key);
    out += '\0';
    out += normalize_label(op.label);
    return out;
}

}  // namespace

std::optional<ReflectionWitness> detect_reflection(const episode::EpisodeTrace& trace) {
    const auto ops = flatten(trace);
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        by_label[normalize_label(ops[i].record->op.label)].push_back(i);
    }
    // Ops are in (step, op) order, so the first hit scanning firsts in order
    // and each bucket forwards is the lexicographic minimum.
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto& a = ops[i];
        const auto label = normalize_label(a.record->op.label);
        for (auto k : by_label[label]) {
            const auto& b = ops[k];
            if (b.ref.step <= a.ref.step) continue;
            if (!dsl::canonical_equal(a.record->op, b.record->op)) {
                return ReflectionWitness{a.ref, b.ref, label, a.record->op, b.record->op};
            }
        }
    }
    return std::nullopt;
}

std::optional<DuplicateWitness> detect_duplicate(const episode::EpisodeTrace& trace) {
    const auto ops = flatten(trace);
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        groups[canonical_key(ops[i].record->op)].push_back(i);
    }
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (const auto& [key, members] : groups) {
        for (std::size_t m = 0; m + 1 < members.size(); ++m) {
            if (!ops[members[m]].record->executed) continue;
            const std::pair candidate{members[m], members[m + 1]};
            if (!best || candidate < *best) best = candidate;
            break;
        }
    }
    if (!best) return std::nullopt;
    return DuplicateWitness{ops[best->first].ref, ops[best->second].ref,
                            ops[best->first].record->op};
}

bool answer_correct(const episode::EpisodeTrace& trace, const Task& task,
                    const RrsOptions& options) {
    const double s = reward::score_correct(task, trace.final_answer, options.ladder);
    if (!(s > options.beta)) return false;
    return task.type == dsl::QuestionType::Choice ? s == 1.0 : s >= options.numeric_cut;
}

RrsDecision rrs_filter(const episode::EpisodeTrace& trace, const Task& task,
                       const RrsOptions& options) {
    if (trace.termination != episode::Termination::Answered) return RrsDecision::Reject;
    if (!answer_correct(trace, task, options)) return RrsDecision::Reject;
    if (reward::score_format(trace) != 1) return RrsDecision::Reject;
    return detect_reflection(trace) ? RrsDecision::Accept : RrsDecision::Reject;
}

RrsDecision cold_start_filter(const episode::EpisodeTrace& trace, const Task& task,
                              const RrsOptions& options, std::size_t min_steps) {
    if (trace.termination != episode::Termination::Answered) return RrsDecision::Reject;
    if (trace.steps.size() < min_steps) return RrsDecision::Reject;
    if (!answer_correct(trace, task, options)) return RrsDecision::Reject;
    return reward::score_format(trace) == 1 ? RrsDecision::Accept : RrsDecision::Reject;
}

}  // namespace drawspace::reflect
