// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "drawspace/error.hpp"
#include "drawspace/evalharness.hpp"
#include "drawspace/reward.hpp"

namespace drawspace::eval {

namespace {

const std::set<std::string> kKnownFields = {"id",   "question", "type",   "options",
                                            "answer", "subtask", "images", "image_path"};

}  // namespace

std::optional<Task> task_from_json(const nlohmann::json& row, std::vector<std::string>& bad) {
    if (!row.is_object()) {
        bad.push_back("<row is not an object>");
        return std::nullopt;
    }
    Task task;
    if (row.contains("id") && row["id"].is_string() && !row["id"].get<std::string>().empty()) {
        task.id = row["id"].get<std::string>();
    } else {
        bad.push_back("id");
    }
    if (row.contains("question") && row["question"].is_string()) {
        task.question = row["question"].get<std::string>();
    } else {
        bad.push_back("question");
    }

    if (row.contains("images")) {
        const auto& images = row["images"];
        bool ok = images.is_array() && !images.empty();
        if (ok) {
            for (const auto& p : images) {
                if (!p.is_string()) ok = false;
                else task.image_paths.push_back(p.get<std::string>());
            }
        }
        if (!ok) bad.push_back("images");
    } else if (row.contains("image_path") && row["image_path"].is_string()) {
        task.image_paths.push_back(row["image_path"].get<std::string>());
    } else {
        bad.push_back("images");
    }

    if (row.contains("options")) {
        bool ok = row["options"].is_array() && row["options"].size() <= 26;
        if (ok) {
            for (const auto& o : row["options"]) {
                if (!o.is_string()) ok = false;
                else task.options.push_back(o.get<std::string>());
            }
        }
        if (!ok) bad.push_back("options");
    }

    bool type_ok = true;
    if (row.contains("type")) {
        if (row["type"] == "choice") task.type = dsl::QuestionType::Choice;
        else if (row["type"] == "numeric") task.type = dsl::QuestionType::Numeric;
        else type_ok = false;
    } else if (!row.contains("options")) {
        type_ok = false;
    }
    if (!type_ok) bad.push_back("type");

    if (!row.contains("answer") || !(row["answer"].is_string() || row["answer"].is_number())) {
        bad.push_back("answer");
    } else if (type_ok) {
        const auto& a = row["answer"];
        task.answer = a.is_string() ? a.get<std::string>() : a.dump();
        try {
            if (task.type == dsl::QuestionType::Choice) {
                const char letter = reward::ground_truth_letter(task);
                if (!task.options.empty() && letter - 'A' >= static_cast<int>(task.options.size())) {
                    bad.push_back("answer");
                }
            } else {
                (void)reward::ground_truth_number(task);
            }
        } catch (const Error&) {
            bad.push_back("answer");
        }
    }

    if (row.contains("subtask")) {
        if (row["subtask"].is_string()) task.subtask = row["subtask"].get<std::string>();
        else bad.push_back("subtask");
    }

    for (const auto& [key, value] : row.items()) {
        if (!kKnownFields.contains(key)) task.metadata[key] = value;
    }
    if (!bad.empty()) return std::nullopt;
    return task;
}

std::vector<Task> load_tasks(const std::filesystem::path& path, bool load_images) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path.string()));
    const auto base = path.parent_path();

    std::vector<Task> tasks;
    std::vector<std::string> problems;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            problems.push_back(fmt::format("line {}: invalid JSON", line_no));
            continue;
        }
        std::vector<std::string> bad;
        auto task = task_from_json(row, bad);
        if (!task) {
            problems.push_back(fmt::format("line {}: bad fields: {}", line_no, fmt::join(bad, ", ")));
            continue;
        }
        if (!ids.insert(task->id).second) {
            problems.push_back(fmt::format("line {}: duplicate id '{}'", line_no, task->id));
            continue;
        }
        if (load_images) {
            try {
                for (const auto& p : task->image_paths) {
                    task->images.push_back(canvas::read_png((base / p).string()));
                }
            } catch (const Error& e) {
                problems.push_back(fmt::format("line {}: images: {}", line_no, e.what()));
                continue;
            }
        }
        tasks.push_back(std::move(*task));
    }
    if (!problems.empty()) {
        throw Error(ErrorCode::Load, fmt::format("{}: {} bad row(s)\n  {}", path.string(),
                                                 problems.size(), fmt::join(problems, "\n  ")));
    }
    return tasks;
}

}  // namespace drawspace::eval
