// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include <fmt/format.h>

#include "drawspace/episode.hpp"
#include "drawspace/error.hpp"

namespace drawspace::episode {

namespace {

std::vector<canvas::RasterImage> episode_inputs(const Task& task, const EpisodeConfig& config) {
    if (task.images.empty()) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("task '{}' has no input image", task.id));
    }
    std::vector<canvas::RasterImage> inputs;
    for (auto i : sample_frame_indices(task.images.size(),
                                       static_cast<std::size_t>(config.frame_budget))) {
        inputs.push_back(task.images[i]);
    }
    if (static_cast<int>(inputs.size()) > config.alpha) {
        throw Error(ErrorCode::InvalidConfig,
                    fmt::format("task '{}' has {} input images, more than alpha = {}", task.id,
                                inputs.size(), config.alpha));
    }
    return inputs;
}

int stroke_width_for(const canvas::RasterImage& img) {
    return std::max(2, std::min(img.width(), img.height()) / 200);
}

int option_count(const Task& task) {
    return task.options.empty() ? 26 : static_cast<int>(std::min<std::size_t>(task.options.size(), 26));
}

}  // namespace

void EpisodeConfig::validate() const {
    if (alpha < 1) throw Error(ErrorCode::InvalidConfig, "alpha must be >= 1");
    if (max_steps < 1) throw Error(ErrorCode::InvalidConfig, "max_steps must be >= 1");
    if (frame_budget < 1) throw Error(ErrorCode::InvalidConfig, "frame_budget must be >= 1");
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::Answered: return "answered";
        case Termination::NoOpFault: return "no-op-fault";
        case Termination::ImageCap: return "image-cap";
        case Termination::DuplicateOp: return "duplicate-op";
        case Termination::StepCap: return "step-cap";
        case Termination::PolicyError: return "policy-error";
    }
    return "policy-error";
}

Termination termination_from_string(std::string_view text) {
    for (auto t : {Termination::Answered, Termination::NoOpFault, Termination::ImageCap,
                   Termination::DuplicateOp, Termination::StepCap, Termination::PolicyError}) {
        if (to_string(t) == text) return t;
    }
    throw Error(ErrorCode::Parse, fmt::format("unknown termination cause '{}'", text));
}

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

int Conversation::assistant_turns() const noexcept {
    return static_cast<int>(std::count_if(messages.begin(), messages.end(),
                                          [](const Message& m) { return m.role == Role::Assistant; }));
}

std::vector<std::size_t> sample_frame_indices(std::size_t count, std::size_t budget) {
    std::vector<std::size_t> out;
    if (count <= budget || budget == 0) {
        for (std::size_t i = 0; i < count; ++i) out.push_back(i);
        return out;
    }
    if (budget == 1) return {0};
    // Evenly spaced over [0, count-1], rounded to the nearest frame.
    for (std::size_t i = 0; i < budget; ++i) {
        out.push_back((i * (count - 1) * 2 + (budget - 1)) / (2 * (budget - 1)));
    }
    return out;
}

Episode::Episode(const Task& task, EpisodeConfig config, std::uint64_t seed)
    : task_(task),
      config_((config.validate(), config)),
      registry_(episode_inputs(task, config_)) {
    trace_.task_id = task.id;
    conversation_.images = &registry_;
    conversation_.seed = seed;
    conversation_.messages.push_back(
        {Role::System, PromptKind::System, {ContentPart{system_prompt(), std::nullopt}}});
    conversation_.messages.push_back(initial_prompt(task_, registry_));
    prepare_next_prompt(nullptr);
}

void Episode::prepare_next_prompt(const Step* last) {
    if (last) conversation_.messages.push_back(follow_up_prompt(*last, registry_));
    const bool images_full = registry_.size() >= config_.alpha;
    const bool last_step = step_count() + 1 >= config_.max_steps;
    if (images_full || last_step) {
        final_prompt_ = true;
        pending_cause_ = images_full ? Termination::ImageCap : Termination::StepCap;
        conversation_.messages.push_back(final_answer_prompt(pending_cause_));
    }
}

void Episode::finish(Termination cause) {
    trace_.termination = cause;
    trace_.registry = registry_.provenance();
    done_ = true;
}

void Episode::fail(std::string_view message) {
    if (done_) return;
    trace_.error = std::string(message);
    finish(Termination::PolicyError);
}

Episode::Validation Episode::validate_ops(const dsl::PolicyResponse& resp) const {
    Validation v;
    for (const auto& op : resp.ops) {
        std::string error;
        if (!registry_.contains(op.image_index)) {
            error = fmt::format("image index {} is not available (have 1-{})", op.image_index,
                                registry_.size());
        } else {
            const auto& target = registry_.at(op.image_index);
            try {
                if (const auto* box = std::get_if<canvas::BBoxGeometry>(&op.geometry)) {
                    (void)canvas::clamp_box(*box, target.width(), target.height());
                } else {
                    (void)canvas::clamp_polyline(std::get<canvas::PolylineGeometry>(op.geometry),
                                                 target.width(), target.height());
                }
            } catch (const Error& e) {
                error = e.what();
            }
        }
        if (error.empty()) ++v.executable;
        v.errors.push_back(std::move(error));
    }
    return v;
}

std::optional<Termination> Episode::check_termination(const dsl::PolicyResponse& resp) const {
    if (resp.final_answer) return std::nullopt;
    if (resp.ops.empty()) return Termination::NoOpFault;

    const auto v = validate_ops(resp);
    for (std::size_t j = 0; j < resp.ops.size(); ++j) {
        const auto& op = resp.ops[j];
        for (const auto& prev : executed_) {
            if (dsl::canonical_equal(op, prev)) return Termination::DuplicateOp;
        }
        for (std::size_t i = 0; i < j; ++i) {
            if (v.errors[i].empty() && dsl::canonical_equal(op, resp.ops[i])) {
                return Termination::DuplicateOp;
            }
        }
    }
    if (registry_.size() + v.executable > config_.alpha) return Termination::ImageCap;
    return std::nullopt;
}

void Episode::step(const dsl::PolicyResponse& resp, std::string raw) {
    if (done_) throw std::logic_error("step() on a finished episode");
    const int t = step_count() + 1;
    const auto v = validate_ops(resp);

    Step s;
    s.response = std::move(raw);
    s.thought = resp.thought;
    s.final_prompt = final_prompt_;
    for (std::size_t j = 0; j < resp.ops.size(); ++j) {
        OpRecord rec{resp.ops[j], false, std::nullopt, v.errors[j]};
        if (rec.error.empty() && registry_.size() >= config_.alpha) {
            rec.error = fmt::format("image limit {} reached", config_.alpha);
        }
        if (rec.error.empty()) {
            const auto& op = rec.op;
            const auto& target = registry_.at(op.image_index);
            const canvas::DrawStyle style{canvas::label_color(op.label), stroke_width_for(target)};
            canvas::RasterImage out =
                op.kind() == dsl::OpKind::Box
                    ? canvas::draw_bbox(target, std::get<canvas::BBoxGeometry>(op.geometry),
                                        op.label, style)
                    : canvas::draw_polyline(
                          target, std::get<canvas::PolylineGeometry>(op.geometry), op.label, style);
            rec.output_index = registry_.append(std::move(out), t, static_cast<int>(j) + 1);
            rec.executed = true;
            s.observations.push_back(*rec.output_index);
            executed_.push_back(op);
        }
        s.ops.push_back(std::move(rec));
    }
    trace_.steps.push_back(std::move(s));
}

void Episode::record_unexecuted(const dsl::PolicyResponse& resp, std::string raw,
                                std::string reason, std::optional<std::string> parse_error) {
    Step s;
    s.response = std::move(raw);
    s.thought = resp.thought;
    s.final_prompt = final_prompt_;
    s.parse_error = std::move(parse_error);
    for (const auto& op : resp.ops) s.ops.push_back(OpRecord{op, false, std::nullopt, reason});
    trace_.steps.push_back(std::move(s));
}

void Episode::advance(std::string_view reply) {
    if (done_) throw std::logic_error("advance() on a finished episode");
    conversation_.messages.push_back(
        {Role::Assistant, PromptKind::Reply, {ContentPart{std::string(reply), std::nullopt}}});

    dsl::PolicyResponse resp;
    try {
        resp = dsl::parse_response(reply);
    } catch (const Error& e) {
        record_unexecuted({}, std::string(reply), {}, std::string(e.what()));
        finish(Termination::NoOpFault);
        return;
    }

    if (resp.final_answer) {
        Step s;
        s.response = std::string(reply);
        s.thought = resp.thought;
        s.final_prompt = final_prompt_;
        trace_.steps.push_back(std::move(s));
        trace_.final_answer = dsl::try_extract_answer(*resp.final_answer, task_.type,
                                                      option_count(task_));
        finish(Termination::Answered);
        return;
    }
    if (final_prompt_) {
        const auto cause = resp.ops.empty() ? Termination::NoOpFault : pending_cause_;
        record_unexecuted(resp, std::string(reply), "not executed: a final answer was required");
        finish(cause);
        return;
    }
    if (const auto cause = check_termination(resp)) {
        record_unexecuted(resp, std::string(reply),
                          fmt::format("not executed: rollout terminated ({})", to_string(*cause)));
        finish(*cause);
        return;
    }
    step(resp, std::string(reply));
    prepare_next_prompt(&trace_.steps.back());
}

EpisodeResult run_episode_with_images(PolicyPort& policy, const Task& task,
                                      const EpisodeConfig& config, std::uint64_t seed) {
    Episode ep(task, config, seed);
    while (!ep.done()) {
        std::string reply;
        try {
            reply = policy.next(ep.conversation());
        } catch (const std::exception& e) {
            ep.fail(e.what());
            break;
        }
        ep.advance(reply);
    }
    return EpisodeResult{ep.trace(), ep.registry()};
}

EpisodeTrace run_episode(PolicyPort& policy, const Task& task, const EpisodeConfig& config,
                         std::uint64_t seed) {
    return run_episode_with_images(policy, task, config, seed).trace;
}

}  // namespace drawspace::episode
