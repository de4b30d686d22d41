// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "drawspace/episode.hpp"
#include "drawspace/reward.hpp"
#include "drawspace/task.hpp"

namespace drawspace::eval {

/// Reads a task JSONL file. Each row needs id, question, answer and either
/// `images` (list of PNG paths) or `image_path`; `type` defaults to
/// "choice" when `options` is present. Image paths resolve against the
/// file's directory. Throws Error{Load} listing every bad row by line
/// number and offending fields.
std::vector<Task> load_tasks(const std::filesystem::path& path, bool load_images = true);

/// Validates one row. On failure returns the list of offending fields.
std::optional<Task> task_from_json(const nlohmann::json& row, std::vector<std::string>& bad_fields);

struct SubtaskMetric {
    std::string name;
    std::size_t count = 0;
    double score = 0.0;
};

struct BehaviorStats {
    double reflection_ratio = 0.0;
    double mean_steps = 0.0;
    double mean_box_ops = 0.0;
    double mean_line_ops = 0.0;
};

struct EvalReport {
    /// Per-subtask means; empty when no task carries a subtask.
    std::vector<SubtaskMetric> subtasks;
    /// Unweighted mean over subtasks when present, else over items.
    double overall = 0.0;
    std::size_t items = 0;
    std::optional<double> choice_accuracy;
    std::optional<double> numeric_mra;
    BehaviorStats behavior;
    /// pass@k values keyed by k, filled by the caller when attempts exist.
    std::vector<std::pair<std::size_t, double>> pass_at;

    [[nodiscard]] nlohmann::json to_json() const;
    /// Aligned plain-text table.
    [[nodiscard]] std::string to_table() const;
};

/// Joins traces to tasks by id (one trace per task) and aggregates
/// accuracy / MRA and behavioural statistics. Throws Error{Join} on
/// unknown, repeated or missing ids.
EvalReport evaluate(std::span<const episode::EpisodeTrace> traces, std::span<const Task> tasks,
                    const reward::ConfidenceLadder& ladder = {});

BehaviorStats behavior_stats(std::span<const episode::EpisodeTrace> traces);

/// Fraction of tasks with at least one success among their first k
/// attempts. Throws Error{InsufficientAttempts} when a task has fewer than k.
double pass_at_k(const std::vector<std::vector<bool>>& attempts, std::size_t k);

/// Success of one attempt for pass@k: exact letter for choice questions,
/// MRA >= numeric_cut for numeric ones.
bool attempt_correct(const episode::EpisodeTrace& trace, const Task& task,
                     double numeric_cut = 0.5, const reward::ConfidenceLadder& ladder = {});

}  // namespace drawspace::eval
