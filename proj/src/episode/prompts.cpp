// SPDX-License-Identifier: Apache-2.0
#include <fmt/format.h>

#include "drawspace/episode.hpp"

namespace drawspace::episode {

namespace {

ContentPart text(std::string s) { return ContentPart{std::move(s), std::nullopt}; }
ContentPart image(int index) { return ContentPart{{}, index}; }

std::string index_range(int count) {
    return count == 1 ? "1" : fmt::format("1-{}", count);
}

}  // namespace

std::string system_prompt() {
    return R"(You are a spatial reasoning assistant that reasons by drawing on images.
Every image has an index. The input images are numbered first (starting at 1) and every drawing output receives the next free index.
Two drawing operations are available:
  box  - bounding box, p=x1,y1,x2,y2 in pixels with the origin at the top-left corner
  line - auxiliary polyline, p=x1,y1;x2,y2;... with at least two points
Each operation takes k (index of the image to draw on), p (coordinates) and l (a label describing what is drawn).
At every step, first write your reasoning. Then either request drawing operations in a single block, one per line:
```draw
box k=1 p=10,20,110,140 l="chair"
line k=2 p=40,40;200,40 l="path to the door"
```
or, when you are certain, give the final answer on its own line:
Answer: <option letter or number>
Never request drawing operations and give a final answer in the same reply.)";
}

Message initial_prompt(const Task& task, const ImageRegistry& registry) {
    Message msg{Role::User, PromptKind::Initial, {}};
    const bool video = registry.input_count() > 1;
    msg.parts.push_back(text(video ? "Video frames:" : "Image:"));
    for (int i = 1; i <= registry.input_count(); ++i) {
        msg.parts.push_back(text(fmt::format("Image {}:", i)));
        msg.parts.push_back(image(i));
    }
    std::string body = fmt::format("Question: {}\n", task.question);
    if (!task.options.empty()) {
        body += "Options:\n";
        for (std::size_t i = 0; i < task.options.size() && i < 26; ++i) {
            body += fmt::format("{}. {}\n", static_cast<char>('A' + i), task.options[i]);
        }
    }
    body += task.type == dsl::QuestionType::Choice
                ? "Answer with the option letter."
                : "Answer with a single numerical value (e.g. 42 or 3.14).";
    body += fmt::format("\nAvailable images: {}.", index_range(registry.size()));
    msg.parts.push_back(text(std::move(body)));
    return msg;
}

Message follow_up_prompt(const Step& step, const ImageRegistry& registry) {
    Message msg{Role::User, PromptKind::FollowUp, {}};
    msg.parts.push_back(text("Drawing results:"));
    for (std::size_t j = 0; j < step.ops.size(); ++j) {
        const auto& rec = step.ops[j];
        if (rec.executed && rec.output_index) {
            msg.parts.push_back(text(fmt::format("Operation {} on image {} -> image {}:", j + 1,
                                                 rec.op.image_index, *rec.output_index)));
            msg.parts.push_back(image(*rec.output_index));
        } else {
            msg.parts.push_back(
                text(fmt::format("Operation {} could not be executed: {}", j + 1, rec.error)));
        }
    }
    msg.parts.push_back(text(fmt::format(
        "Available images: {}. Continue reasoning: draw again or give the final answer.",
        index_range(registry.size()))));
    return msg;
}

Message final_answer_prompt(Termination pending_cause) {
    const char* limit = pending_cause == Termination::ImageCap ? "image" : "reasoning step";
    return Message{Role::User,
                   PromptKind::FinalAnswer,
                   {text(fmt::format("The {} limit has been reached. Do not draw anything else. "
                                     "Give your final answer now on a line starting with "
                                     "'Answer:'.",
                                     limit))}};
}

}  // namespace drawspace::episode
