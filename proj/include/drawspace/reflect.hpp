// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "drawspace/dsl.hpp"
#include "drawspace/episode.hpp"
#include "drawspace/reward.hpp"
#include "drawspace/task.hpp"

namespace drawspace::reflect {

/// Position of an operation in a trace: 1-based step and 1-based index
/// within that step.
struct OpRef {
    int step = 0;
    int op = 0;

    friend auto operator<=>(const OpRef&, const OpRef&) = default;
};

/// Two operations at different steps that share a normalized label but
/// differ in kind, target image or coordinates.
struct ReflectionWitness {
    OpRef first;
    OpRef second;
    std::string label;
    dsl::DrawOperation first_op;
    dsl::DrawOperation second_op;
};

/// An operation repeated after an executed, canonically equal one.
struct DuplicateWitness {
    OpRef first;
    OpRef second;
    dsl::DrawOperation op;
};

/// First reflection witness in lexicographic (t1, u, t2, v) order, if any.
std::optional<ReflectionWitness> detect_reflection(const episode::EpisodeTrace& trace);

/// First duplicate in lexicographic (t1, u, t2, v) order: (t1, u) executed,
/// (t2, v) later in the trace and canonically equal to it.
std::optional<DuplicateWitness> detect_duplicate(const episode::EpisodeTrace& trace);

struct RrsOptions {
    double beta = 0.0;
    /// Minimum MRA counted as a correct numeric answer.
    double numeric_cut = 0.5;
    reward::ConfidenceLadder ladder;
};

enum class RrsDecision { Accept, Reject };

/// Keeps a trace only when it answered correctly, every operation executed
/// and it shows reflection.
RrsDecision rrs_filter(const episode::EpisodeTrace& trace, const Task& task,
                       const RrsOptions& options = {});

/// Cold-start selection: answered correctly, every operation executed and
/// at least `min_steps` reasoning steps.
RrsDecision cold_start_filter(const episode::EpisodeTrace& trace, const Task& task,
                              const RrsOptions& options = {}, std::size_t min_steps = 3);

/// Correctness used by the data filters: exact letter match for choice
/// questions, MRA >= numeric_cut for numeric ones; always also > beta.
bool answer_correct(const episode::EpisodeTrace& trace, const Task& task,
                    const RrsOptions& options = {});

}  // namespace drawspace::reflect
