// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "drawspace/canvas.hpp"
#include "drawspace/dsl.hpp"

namespace drawspace {

/// One question over one or more images. `answer` is the ground truth as
/// written in the source record: an option letter or a decimal number.
struct Task {
    std::string id;
    std::string question;
    dsl::QuestionType type = dsl::QuestionType::Choice;
    std::vector<std::string> options;
    std::string answer;
    std::optional<std::string> subtask;
    std::vector<std::string> image_paths;
    std::vector<canvas::RasterImage> images;
    /// Source record fields not covered above (e.g. maze generator metadata).
    nlohmann::json metadata = nlohmann::json::object();
};

}  // namespace drawspace
