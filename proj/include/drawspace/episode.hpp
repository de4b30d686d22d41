// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drawspace/canvas.hpp"
#include "drawspace/dsl.hpp"
#include "drawspace/task.hpp"

namespace drawspace::episode {

/// Where a registry entry came from: original input n, or output of
/// operation `op` at reasoning step `step` (all 1-based).
struct Provenance {
    enum class Source { Input, Operation };
    Source source = Source::Input;
    int input = 0;
    int step = 0;
    int op = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Append-only, 1-based store of the original inputs followed by every
/// drawing output of the episode.
class ImageRegistry {
public:
    explicit ImageRegistry(std::vector<canvas::RasterImage> inputs);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(images_.size()); }
    [[nodiscard]] int input_count() const noexcept { return inputs_; }
    [[nodiscard]] bool contains(int index) const noexcept { return index >= 1 && index <= size(); }

    [[nodiscard]] const canvas::RasterImage& at(int index) const;
    [[nodiscard]] const Provenance& provenance(int index) const;
    [[nodiscard]] const std::vector<Provenance>& provenance() const noexcept { return provenance_; }

    /// PNG bytes of entry `index`, encoded once and cached.
    [[nodiscard]] const std::vector<std::uint8_t>& png(int index) const;

    /// Appends an operation output and returns its index.
    int append(canvas::RasterImage image, int step, int op);

private:
    std::vector<canvas::RasterImage> images_;
    std::vector<Provenance> provenance_;
    mutable std::vector<std::vector<std::uint8_t>> png_cache_;
    int inputs_ = 0;
};

struct EpisodeConfig {
    /// Maximum cumulative number of images in the registry.
    int alpha = 42;
    /// Maximum number of reasoning steps (policy replies).
    int max_steps = 16;
    /// Video inputs longer than this are uniformly subsampled first.
    int frame_budget = 16;

    void validate() const;
};

enum class Termination { Answered, NoOpFault, ImageCap, DuplicateOp, StepCap, PolicyError };

std::string_view to_string(Termination t) noexcept;
Termination termination_from_string(std::string_view text);

/// True for the causes that zero the reward regardless of the answer.
[[nodiscard]] constexpr bool forces_zero_reward(Termination t) noexcept {
    return t == Termination::NoOpFault || t == Termination::ImageCap ||
           t == Termination::DuplicateOp || t == Termination::PolicyError;
}

struct OpRecord {
    dsl::DrawOperation op;
    bool executed = false;
    std::optional<int> output_index;
    /// Why the operation did not run; empty when executed.
    std::string error;

    friend bool operator==(const OpRecord&, const OpRecord&) = default;
};

struct Step {
    std::string response;
    std::string thought;
    std::vector<OpRecord> ops;
    std::vector<int> observations;
    std::optional<std::string> parse_error;
    /// The step answered the final-answer prompt.
    bool final_prompt = false;

    friend bool operator==(const Step&, const Step&) = default;
};

struct EpisodeTrace {
    std::string task_id;
    std::vector<Step> steps;
    Termination termination = Termination::PolicyError;
    std::optional<dsl::FinalAnswer> final_answer;
    std::vector<Provenance> registry;
    /// Transport or configuration message for policy-error traces.
    std::string error;

    friend bool operator==(const EpisodeTrace&, const EpisodeTrace&) = default;
};

// -- conversation handed to the policy ------------------------------------

enum class Role { System, User, Assistant };
std::string_view to_string(Role role) noexcept;

/// Which template produced a user message.
enum class PromptKind { System, Initial, FollowUp, FinalAnswer, Reply };

struct ContentPart {
    std::string text;
    /// Set for image parts; refers to the episode registry.
    std::optional<int> image_index;
};

struct Message {
    Role role = Role::User;
    PromptKind kind = PromptKind::Reply;
    std::vector<ContentPart> parts;
};

struct Conversation {
    std::vector<Message> messages;
    const ImageRegistry* images = nullptr;
    /// Per-episode seed for stochastic policies.
    std::uint64_t seed = 0;

    [[nodiscard]] int assistant_turns() const noexcept;
};

/// Language-model side of the loop. next() returns the raw reply text for
/// the full conversation so far and throws on transport failure.
class PolicyPort {
public:
    virtual ~PolicyPort() = default;
    virtual std::string next(const Conversation& conversation) = 0;
    /// Stochastic policies may reply differently for an identical
    /// conversation and seed.
    [[nodiscard]] virtual bool stochastic() const noexcept { return false; }
};

// -- prompt templates ------------------------------------------------------

std::string system_prompt();
Message initial_prompt(const Task& task, const ImageRegistry& registry);
Message follow_up_prompt(const Step& step, const ImageRegistry& registry);
Message final_answer_prompt(Termination pending_cause);

// -- state machine -----------------------------------------------------------

/// Uniformly subsamples `count` frames down to `budget` (indices of the
/// kept frames, ascending). Returns all indices when count <= budget.
std::vector<std::size_t> sample_frame_indices(std::size_t count, std::size_t budget);

/// Mutable state of one episode: registry, trace and conversation.
class Episode {
public:
    Episode(const Task& task, EpisodeConfig config, std::uint64_t seed = 0);
    Episode(const Episode&) = delete;
    Episode& operator=(const Episode&) = delete;

    [[nodiscard]] bool done() const noexcept { return done_; }
    [[nodiscard]] const EpisodeTrace& trace() const noexcept { return trace_; }
    [[nodiscard]] const ImageRegistry& registry() const noexcept { return registry_; }
    [[nodiscard]] const Conversation& conversation() const noexcept { return conversation_; }
    [[nodiscard]] const EpisodeConfig& config() const noexcept { return config_; }
    /// Number of steps recorded so far.
    [[nodiscard]] int step_count() const noexcept { return static_cast<int>(trace_.steps.size()); }
    /// True when the next reply is the last one allowed (final-answer prompt issued).
    [[nodiscard]] bool final_prompt_issued() const noexcept { return final_prompt_; }

    /// Feeds one raw policy reply through parsing, termination checks and
    /// execution.
    void advance(std::string_view reply);
    /// Records a transport failure and ends the episode.
    void fail(std::string_view message);

    /// Validates and executes the operations of a parsed response, appends
    /// the outputs and the step. Ops with an unknown image index or
    /// unrenderable geometry are kept but marked non-executable.
    void step(const dsl::PolicyResponse& resp, std::string raw);

    /// Early-termination check for a parsed, non-answer response.
    [[nodiscard]] std::optional<Termination> check_termination(
        const dsl::PolicyResponse& resp) const;

private:
    struct Validation {
        std::vector<std::string> errors;  // empty string = executable
        int executable = 0;
    };
    Validation validate_ops(const dsl::PolicyResponse& resp) const;
    void finish(Termination cause);
    void record_unexecuted(const dsl::PolicyResponse& resp, std::string raw, std::string reason,
                           std::optional<std::string> parse_error = std::nullopt);
    void prepare_next_prompt(const Step* last);

    const Task& task_;
    EpisodeConfig config_;
    ImageRegistry registry_;
    EpisodeTrace trace_;
    Conversation conversation_;
    std::vector<dsl::DrawOperation> executed_;
    bool done_ = false;
    bool final_prompt_ = false;
    Termination pending_cause_ = Termination::StepCap;
};

struct EpisodeResult {
    EpisodeTrace trace;
    ImageRegistry registry;
};

/// Drives `policy` until an answer or a termination cause.
EpisodeResult run_episode_with_images(PolicyPort& policy, const Task& task,
                                      const EpisodeConfig& config, std::uint64_t seed = 0);
EpisodeTrace run_episode(PolicyPort& policy, const Task& task, const EpisodeConfig& config,
                         std::uint64_t seed = 0);

}  // namespace drawspace::episode
