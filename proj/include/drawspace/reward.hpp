// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "drawspace/dsl.hpp"
#include "drawspace/episode.hpp"
#include "drawspace/task.hpp"

namespace drawspace::reward {

/// Confidence thresholds for Mean Relative Accuracy. A prediction passes
/// threshold theta when its relative error is strictly below 1 - theta.
class ConfidenceLadder {
public:
    /// {0.50, 0.55, ..., 0.95}.
    ConfidenceLadder();
    /// Custom thresholds, strictly increasing, each in [0, 1).
    explicit ConfidenceLadder(std::vector<double> thresholds);

    [[nodiscard]] std::span<const double> thresholds() const noexcept { return thresholds_; }
    /// 1 - theta per threshold, in the same order.
    [[nodiscard]] std::span<const double> margins() const noexcept { return margins_; }
    [[nodiscard]] std::size_t size() const noexcept { return thresholds_.size(); }

private:
    std::vector<double> thresholds_;
    std::vector<double> margins_;
};

struct RewardBreakdown {
    double s_correct = 0.0;
    int s_format = 0;
    int gate = 0;
    double total = 0.0;

    friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

/// 1 when the predicted letter equals the ground-truth letter (case
/// folded), 0 otherwise or when nothing was parsed.
double score_choice(char ground_truth, const dsl::FinalAnswer& prediction);

/// Mean Relative Accuracy with |ground_truth| as the denominator. A zero
/// ground truth scores by exact match; a missing or non-finite prediction
/// scores 0.
double score_numeric_mra(double ground_truth, double prediction,
                         const ConfidenceLadder& ladder = {});
double score_numeric_mra(double ground_truth, const dsl::FinalAnswer& prediction,
                         const ConfidenceLadder& ladder = {});

/// Correctness of a final answer against a task's ground truth.
double score_correct(const Task& task, const std::optional<dsl::FinalAnswer>& prediction,
                     const ConfidenceLadder& ladder = {});

/// 1 iff every operation in the path executed and a final answer parsed.
int score_format(const episode::EpisodeTrace& trace);

/// Gated total: gate * (s_correct + s_format) with gate = 1(s_correct > beta).
/// Early-terminated causes force every field to zero.
RewardBreakdown combine_reward(double s_correct, int s_format, episode::Termination termination,
                               double beta = 0.0);

RewardBreakdown total_reward(const episode::EpisodeTrace& trace, const Task& task,
                             double beta = 0.0, const ConfidenceLadder& ladder = {});

/// Ground truth letter or number parsed from a task's answer field.
char ground_truth_letter(const Task& task);
double ground_truth_number(const Task& task);

nlohmann::json to_json(const RewardBreakdown& r);
RewardBreakdown reward_from_json(const nlohmann::json& j);

}  // namespace drawspace::reward
