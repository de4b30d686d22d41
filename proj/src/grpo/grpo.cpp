// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "drawspace/error.hpp"
#include "drawspace/grpo.hpp"

namespace drawspace::grpo {

std::vector<double> group_advantages(std::span<const double> scores) {
    if (scores.size() < 2) {
        throw Error(ErrorCode::GroupTooSmall,
                    fmt::format("advantages need a group of at least 2, got {}", scores.size()));
    }
    const double n = static_cast<double>(scores.size());
    const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
    double ss = 0.0;
    for (double s : scores) ss += (s - mean) * (s - mean);
    const double std_dev = std::sqrt(ss / n);

    std::vector<double> out(scores.size(), 0.0);
    if (!(std_dev > kDegenerateStd)) return out;
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - mean) / std_dev;
    return out;
}

SurrogateResult clipped_surrogate(std::span<const double> logp_new,
                                  std::span<const double> logp_old, double advantage,
                                  double epsilon, std::span<const std::uint8_t> mask) {
    if (logp_new.size() != logp_old.size() || logp_new.size() != mask.size()) {
        throw Error(ErrorCode::Shape,
                    fmt::format("sequence lengths differ: new {}, old {}, mask {}",
                                logp_new.size(), logp_old.size(), mask.size()));
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("clip epsilon {} outside (0, 1)", epsilon));
    }
    SurrogateResult r;
    r.terms.assign(logp_new.size(), 0.0);
    double sum = 0.0;
    for (std::size_t t = 0; t < logp_new.size(); ++t) {
        if (!mask[t]) continue;
        const double ratio = std::exp(logp_new[t] - logp_old[t]);
        const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
        r.terms[t] = std::min(ratio * advantage, clipped * advantage);
        sum += r.terms[t];
        ++r.token_count;
    }
    r.masked_mean = r.token_count ? sum / static_cast<double>(r.token_count) : 0.0;
    return r;
}

double group_objective(std::span<const PathTokens> paths, std::span<const double> scores,
                       double epsilon) {
    if (paths.size() != scores.size()) {
        throw Error(ErrorCode::Shape, fmt::format("{} paths but {} scores", paths.size(),
                                                  scores.size()));
    }
    const auto adv = group_advantages(scores);
    double total = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        total += clipped_surrogate(paths[i].logp_new, paths[i].logp_old, adv[i], epsilon,
                                   paths[i].mask)
                     .masked_mean;
    }
    return -total / static_cast<double>(paths.size());
}

std::vector<std::uint8_t> token_mask(const episode::EpisodeTrace& trace,
                                     std::span<const TurnTokens> turns) {
    if (turns.size() != trace.steps.size()) {
        throw Error(ErrorCode::Alignment, fmt::format("{} tokenized turns for {} trace steps",
                                                      turns.size(), trace.steps.size()));
    }
    std::vector<std::uint8_t> mask;
    for (std::size_t t = 0; t < turns.size(); ++t) {
        const auto& step = trace.steps[t];
        const auto& turn = turns[t];
        if (step.ops.empty() && turn.ops != 0) {
            throw Error(ErrorCode::Alignment,
                        fmt::format("step {} has no operations but {} operation tokens", t + 1,
                                    turn.ops));
        }
        if (step.observations.empty() && turn.observation != 0) {
            throw Error(ErrorCode::Alignment,
                        fmt::format("step {} has no observations but {} observation tokens",
                                    t + 1, turn.observation));
        }
        if (!step.observations.empty() && turn.observation == 0) {
            throw Error(ErrorCode::Alignment,
                        fmt::format("step {} produced observations but has no observation tokens",
                                    t + 1));
        }
        mask.insert(mask.end(), turn.prompt, 0);
        mask.insert(mask.end(), turn.thought + turn.ops, 1);
        mask.insert(mask.end(), turn.observation, 0);
    }
    return mask;
}

}  // namespace drawspace::grpo
