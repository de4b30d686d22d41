// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "drawspace/error.hpp"
#include "drawspace/reward.hpp"

namespace drawspace::reward {

ConfidenceLadder::ConfidenceLadder() {
    // Twentieths keep 1 - theta exact to the nearest double.
    for (int i = 10; i < 20; ++i) {
        thresholds_.push_back(i / 20.0);
        margins_.push_back((20 - i) / 20.0);
    }
}

ConfidenceLadder::ConfidenceLadder(std::vector<double> thresholds)
    : thresholds_(std::move(thresholds)) {
    if (thresholds_.empty()) throw Error(ErrorCode::InvalidConfig, "confidence ladder is empty");
    for (std::size_t i = 0; i < thresholds_.size(); ++i) {
        const double t = thresholds_[i];
        if (!(t >= 0.0 && t < 1.0)) {
            throw Error(ErrorCode::InvalidConfig, fmt::format("threshold {} outside [0, 1)", t));
        }
        if (i > 0 && !(t > thresholds_[i - 1])) {
            throw Error(ErrorCode::InvalidConfig, "thresholds must be strictly increasing");
        }
        margins_.push_back(1.0 - t);
    }
}

double score_choice(char ground_truth, const dsl::FinalAnswer& prediction) {
    if (!prediction.choice) return 0.0;
    const auto gt = std::toupper(static_cast<unsigned char>(ground_truth));
    const auto pred = std::toupper(static_cast<unsigned char>(*prediction.choice));
    return gt == pred ? 1.0 : 0.0;
}

double score_numeric_mra(double ground_truth, double prediction, const ConfidenceLadder& ladder) {
    if (!std::isfinite(prediction) || !std::isfinite(ground_truth)) return 0.0;
    if (ground_truth == 0.0) return prediction == 0.0 ? 1.0 : 0.0;
    const double relative_error = std::fabs(ground_truth - prediction) / std::fabs(ground_truth);
    std::size_t passed = 0;
    for (double margin : ladder.margins()) {
        if (relative_error < margin) ++passed;
    }
    return static_cast<double>(passed) / static_cast<double>(ladder.size());
}

double score_numeric_mra(double ground_truth, const dsl::FinalAnswer& prediction,
                         const ConfidenceLadder& ladder) {
    if (!prediction.number) return 0.0;
    return score_numeric_mra(ground_truth, *prediction.number, ladder);
}

char ground_truth_letter(const Task& task) {
    for (char c : task.answer) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    throw Error(ErrorCode::Load, fmt::format("task '{}': answer '{}' is not an option letter",
                                             task.id, task.answer));
}

double ground_truth_number(const Task& task) {
    double value = 0;
    const auto& a = task.answer;
    auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), value);
    if (a.empty() || ec != std::errc{} || ptr != a.data() + a.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::Load,
                    fmt::format("task '{}': answer '{}' is not a finite number", task.id, a));
    }
    return value;
}

double score_correct(const Task& task, const std::optional<dsl::FinalAnswer>& prediction,
                     const ConfidenceLadder& ladder) {
    if (!prediction) return 0.0;
    if (task.type == dsl::QuestionType::Choice) {
        return score_choice(ground_truth_letter(task), *prediction);
    }
    return score_numeric_mra(ground_truth_number(task), *prediction, ladder);
}

int score_format(const episode::EpisodeTrace& trace) {
    if (!trace.final_answer || !trace.final_answer->parsed()) return 0;
    for (const auto& step : trace.steps) {
        if (step.parse_error) return 0;
        for (const auto& rec : step.ops) {
            if (!rec.executed) return 0;
        }
    }
    return 1;
}

RewardBreakdown combine_reward(double s_correct, int s_format, episode::Termination termination,
                               double beta) {
    if (episode::forces_zero_reward(termination)) return {};
    RewardBreakdown r;
    r.s_correct = s_correct;
    r.s_format = s_format;
    r.gate = s_correct > beta ? 1 : 0;
    r.total = r.gate ? s_correct + s_format : 0.0;
    return r;
}

RewardBreakdown total_reward(const episode::EpisodeTrace& trace, const Task& task, double beta,
                             const ConfidenceLadder& ladder) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("beta {} outside [0, 1)", beta));
    }
    return combine_reward(score_correct(task, trace.final_answer, ladder), score_format(trace),
                          trace.termination, beta);
}

nlohmann::json to_json(const RewardBreakdown& r) {
    return {{"s_correct", r.s_correct}, {"s_format", r.s_format}, {"gate", r.gate},
            {"total", r.total}};
}

RewardBreakdown reward_from_json(const nlohmann::json& j) {
    return {j.at("s_correct").get<double>(), j.at("s_format").get<int>(), j.at("gate").get<int>(),
            j.at("total").get<double>()};
}

}  // namespace drawspace::reward
