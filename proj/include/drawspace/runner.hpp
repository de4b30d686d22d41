// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drawspace/episode.hpp"
#include "drawspace/reward.hpp"
#include "drawspace/task.hpp"

namespace drawspace::runner {

using PolicyFactory =
    std::function<std::shared_ptr<episode::PolicyPort>(const Task& task, std::size_t attempt)>;

struct RunOptions {
    episode::EpisodeConfig episode;
    std::uint64_t seed = 0;
    int parallel = 1;
    std::size_t attempts = 1;
    double beta = 0.0;
    reward::ConfidenceLadder ladder;
};

struct RunSummary {
    std::size_t episodes = 0;
    std::map<std::string, std::size_t> terminations;
    std::size_t policy_errors = 0;
    double mean_total = 0.0;

    [[nodiscard]] nlohmann::json to_json() const;
};

struct RunOutcome {
    /// Task-major, attempt-minor.
    std::vector<episode::EpisodeTrace> traces;
    std::vector<reward::RewardBreakdown> rewards;
    RunSummary summary;
};

/// Seed for one attempt at one task; independent of scheduling.
std::uint64_t episode_seed(std::uint64_t master, std::string_view task_id, std::size_t attempt);

/// Runs every task `attempts` times. With `out_dir`, writes traces.jsonl
/// (task order), images/<task>[/<attempt>]/<index>.png and summary.json.
RunOutcome run_batch(std::span<const Task> tasks, const PolicyFactory& factory,
                     const RunOptions& options,
                     const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// -- scripted policies ----------------------------------------------------

/// Replies with the given text on every turn.
std::shared_ptr<episode::PolicyPort> fixed_policy(std::string reply);

/// Replies with the scripted texts in order, then with an empty reply.
std::shared_ptr<episode::PolicyPort> replay_policy(std::vector<std::string> replies);

/// Loads `{"id": ..., "replies": [...]}` rows keyed by task id.
std::map<std::string, std::vector<std::string>> load_replays(const std::filesystem::path& path);

/// Answers immediately; correct with probability `hit_rate` drawn from the
/// episode seed, otherwise a wrong answer.
std::shared_ptr<episode::PolicyPort> coin_policy(const Task& task, double hit_rate);

/// Maze oracle for a task loaded from a maze dataset row.
std::shared_ptr<episode::PolicyPort> maze_oracle_for(const Task& task);

}  // namespace drawspace::runner
