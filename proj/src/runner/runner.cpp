// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <fmt/format.h>

#include "drawspace/error.hpp"
#include "drawspace/hash.hpp"
#include "drawspace/maze.hpp"
#include "drawspace/parallel.hpp"
#include "drawspace/random.hpp"
#include "drawspace/runner.hpp"
#include "drawspace/trace_io.hpp"

namespace drawspace::runner {

using episode::Conversation;
using episode::PolicyPort;

namespace {

class FixedPolicy final : public PolicyPort {
public:
    explicit FixedPolicy(std::string reply) : reply_(std::move(reply)) {}
    std::string next(const Conversation&) override { return reply_; }

private:
    std::string reply_;
};

class ReplayPolicy final : public PolicyPort {
public:
    explicit ReplayPolicy(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string next(const Conversation& conv) override {
        const auto turn = static_cast<std::size_t>(conv.assistant_turns());
        return turn < replies_.size() ? replies_[turn] : std::string{};
    }

private:
    std::vector<std::string> replies_;
};

class CoinPolicy final : public PolicyPort {
public:
    CoinPolicy(std::string right, std::string wrong, double p)
        : right_(std::move(right)), wrong_(std::move(wrong)), p_(p) {}
    std::string next(const Conversation& conv) override {
        Rng rng(conv.seed);
        return "Answer: " + (rng.unit() < p_ ? right_ : wrong_);
    }
    [[nodiscard]] bool stochastic() const noexcept override { return true; }

private:
    std::string right_;
    std::string wrong_;
    double p_;
};

}  // namespace

nlohmann::json RunSummary::to_json() const {
    return {{"episodes", episodes},
            {"terminations", terminations},
            {"policy_errors", policy_errors},
            {"mean_total", mean_total}};
}

std::uint64_t episode_seed(std::uint64_t master, std::string_view task_id, std::size_t attempt) {
    return derive_seed(derive_seed(master, fnv1a64(task_id)), attempt);
}

RunOutcome run_batch(std::span<const Task> tasks, const PolicyFactory& factory,
                     const RunOptions& options, const std::optional<std::filesystem::path>& out_dir) {
    options.episode.validate();
    if (options.attempts == 0) throw Error(ErrorCode::InvalidConfig, "attempts must be >= 1");
    if (options.parallel < 1) throw Error(ErrorCode::InvalidConfig, "parallel must be >= 1");

    const std::size_t total = tasks.size() * options.attempts;
    RunOutcome out;
    out.traces.resize(total);
    out.rewards.resize(total);
    std::vector<nlohmann::json> records(out_dir ? total : 0);

    parallel_for(total, options.parallel, [&](std::size_t i) {
        const Task& task = tasks[i / options.attempts];
        const std::size_t attempt = i % options.attempts;
        const auto seed = episode_seed(options.seed, task.id, attempt);
        std::optional<episode::EpisodeResult> result;
        std::string setup_error;
        try {
            auto policy = factory(task, attempt);
            result.emplace(episode::run_episode_with_images(*policy, task, options.episode, seed));
        } catch (const std::exception& e) {
            setup_error = e.what();
        }
        if (!result) {
            // Policy construction failed before the loop could start.
            result.emplace(episode::run_episode_with_images(*fixed_policy(""), task, options.episode, seed));
            result->trace.steps.clear();
            result->trace.final_answer.reset();
            result->trace.termination = episode::Termination::PolicyError;
            result->trace.error = setup_error;
        }
        out.rewards[i] = reward::total_reward(result->trace, task, options.beta, options.ladder);
        if (out_dir) {
            std::string rel = "images/" + episode::path_safe(task.id);
            if (options.attempts > 1) rel += fmt::format("/{}", attempt);
            const auto paths = episode::save_registry_images(result->registry, *out_dir, rel);
            auto rec = episode::trace_to_json(result->trace, paths);
            rec["attempt"] = attempt;
            rec["seed"] = seed;
            rec["reward"] = reward::to_json(out.rewards[i]);
            records[i] = std::move(rec);
        }
        out.traces[i] = std::move(result->trace);
    });

    auto& s = out.summary;
    s.episodes = total;
    double sum = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        const auto t = out.traces[i].termination;
        ++s.terminations[std::string(episode::to_string(t))];
        if (t == episode::Termination::PolicyError) ++s.policy_errors;
        sum += out.rewards[i].total;
    }
    s.mean_total = total == 0 ? 0.0 : sum / static_cast<double>(total);

    if (out_dir) {
        episode::write_jsonl(*out_dir / "traces.jsonl", records);
        episode::write_file(*out_dir / "summary.json", s.to_json().dump(2) + "\n");
    }
    return out;
}

std::shared_ptr<PolicyPort> fixed_policy(std::string reply) {
    return std::make_shared<FixedPolicy>(std::move(reply));
}

std::shared_ptr<PolicyPort> replay_policy(std::vector<std::string> replies) {
    return std::make_shared<ReplayPolicy>(std::move(replies));
}

std::map<std::string, std::vector<std::string>> load_replays(const std::filesystem::path& path) {
    std::map<std::string, std::vector<std::string>> out;
    const auto rows = episode::read_jsonl(path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            out[rows[i].at("id").get<std::string>()] =
                rows[i].at("replies").get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Load, fmt::format("{}: row {}: {}", path.string(), i + 1, e.what()));
        }
    }
    return out;
}

std::shared_ptr<PolicyPort> coin_policy(const Task& task, double hit_rate) {
    if (!(hit_rate >= 0.0 && hit_rate <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "hit rate must lie in [0, 1]");
    }
    std::string right;
    std::string wrong;
    if (task.type == dsl::QuestionType::Choice) {
        const char gt = reward::ground_truth_letter(task);
        right = std::string(1, gt);
        wrong = std::string(1, gt == 'A' ? 'B' : 'A');
    } else {
        const double gt = reward::ground_truth_number(task);
        right = fmt::format("{}", gt);
        wrong = fmt::format("{}", gt + 2.0 * std::abs(gt) + 1.0);
    }
    return std::make_shared<CoinPolicy>(std::move(right), std::move(wrong), hit_rate);
}

std::shared_ptr<PolicyPort> maze_oracle_for(const Task& task) {
    auto record = task.metadata;
    record["id"] = task.id;
    record["answer"] = task.answer;
    return maze::oracle_policy(maze::task_from_record(record));
}

}  // namespace drawspace::runner
