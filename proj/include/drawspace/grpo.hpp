// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drawspace/episode.hpp"

namespace drawspace::grpo {

/// Group standard deviations at or below this produce all-zero advantages.
inline constexpr double kDegenerateStd = 1e-8;
inline constexpr double kDefaultClipEpsilon = 0.2;

/// Group-relative advantages: (S_i - mean) / population std. Throws
/// Error{GroupTooSmall} for fewer than two scores.
std::vector<double> group_advantages(std::span<const double> scores);

struct SurrogateResult {
    /// Per-token min(rho*A, clip(rho, 1-eps, 1+eps)*A); 0 where masked out.
    std::vector<double> terms;
    /// Sum of unmasked terms divided by their count (0 when none).
    double masked_mean = 0.0;
    std::size_t token_count = 0;
};

/// Clipped importance-ratio surrogate for one path. `mask` is 1 on
/// tokens that count (reasoning and operation tokens), 0 elsewhere.
SurrogateResult clipped_surrogate(std::span<const double> logp_new,
                                  std::span<const double> logp_old, double advantage,
                                  double epsilon, std::span<const std::uint8_t> mask);

/// One path of a rollout group for objective evaluation.
struct PathTokens {
    std::vector<double> logp_new;
    std::vector<double> logp_old;
    std::vector<std::uint8_t> mask;
};

/// Group loss without a KL term: -(1/G) * sum_i masked_mean_i, with the
/// advantage of path i broadcast over its tokens.
double group_objective(std::span<const PathTokens> paths, std::span<const double> scores,
                       double epsilon = kDefaultClipEpsilon);

/// Token counts of one turn in the order they appear in the sequence:
/// injected prompt, reasoning text, operation block, observation tokens.
struct TurnTokens {
    std::size_t prompt = 0;
    std::size_t thought = 0;
    std::size_t ops = 0;
    std::size_t observation = 0;
};

/// Loss mask over a tokenized trace: 1 on reasoning and operation tokens,
/// 0 on prompts and tool observations. Throws Error{Alignment} when the
/// turns do not line up with the trace steps.
std::vector<std::uint8_t> token_mask(const episode::EpisodeTrace& trace,
                                     std::span<const TurnTokens> turns);

}  // namespace drawspace::grpo
