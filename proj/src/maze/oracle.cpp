// SPDX-License-Identifier: Apache-2.0
#include <fmt/format.h>

#include "drawspace/dsl.hpp"
#include "drawspace/error.hpp"
#include "drawspace/maze.hpp"

namespace drawspace::maze {

namespace {

class OraclePolicy final : public episode::PolicyPort {
public:
    explicit OraclePolicy(MazeTask task) : task_(std::move(task)) {}

    std::string next(const episode::Conversation& conversation) override {
        const int latest = conversation.images ? conversation.images->size() : 1;
        return oracle_reply(task_, conversation.assistant_turns(), latest);
    }

private:
    MazeTask task_;
};

}  // namespace

std::string oracle_reply(const MazeTask& task, int turn, int latest_image) {
    dsl::PolicyResponse resp;
    if (turn < static_cast<int>(task.actions.size())) {
        Cell from = task.maze.start();
        for (int i = 0; i < turn; ++i) from = step(from, task.actions[static_cast<std::size_t>(i)]);
        const Move move = task.actions[static_cast<std::size_t>(turn)];
        const Cell to = step(from, move);
        resp.thought = fmt::format(
            "Move {} of {} is '{}': from row {}, column {} to row {}, column {}. "
            "I trace it on the latest image.",
            turn + 1, task.actions.size(), to_string(move), from.row + 1, from.col + 1,
            to.row + 1, to.col + 1);
        resp.ops.push_back(dsl::DrawOperation{
            latest_image,
            canvas::PolylineGeometry{{cell_center(from), cell_center(to)}},
            fmt::format("move {}: {}", turn + 1, to_string(move))});
    } else {
        resp.thought = fmt::format(
            "The traced path covers all {} moves and ends on the cell marked {}.",
            task.actions.size(), task.answer);
        resp.final_answer = std::string(1, task.answer);
    }
    return dsl::serialize_response(resp);
}

std::shared_ptr<episode::PolicyPort> oracle_policy(const MazeTask& task) {
    return std::make_shared<OraclePolicy>(task);
}

MazeTask task_from_record(const nlohmann::json& record) {
    try {
        const int size = record.at("grid_size").get<int>();
        const auto seed = record.at("seed").get<std::uint64_t>();
        auto task = gen_task(gen_maze(size, seed), seed);
        std::vector<Move> actions;
        for (const auto& a : record.at("actions")) actions.push_back(move_from_string(a.get<std::string>()));
        if (actions != task.actions || record.at("answer").get<std::string>() != std::string(1, task.answer)) {
            throw Error(ErrorCode::Load, fmt::format("maze record '{}' does not match its seed",
                                                     record.value("id", std::string("?"))));
        }
        return task;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Load, fmt::format("not a maze record: {}", e.what()));
    }
}

Task to_task(const MazeTask& task, std::string id) {
    Task out;
    out.id = std::move(id);
    out.question = task.question;
    out.type = dsl::QuestionType::Choice;
    out.options = task.options;
    out.answer = std::string(1, task.answer);
    out.images.push_back(render_maze(task.maze));
    nlohmann::json actions = nlohmann::json::array();
    for (auto m : task.actions) actions.push_back(to_string(m));
    out.metadata = {{"grid_size", task.maze.size()}, {"seed", task.maze.seed()}, {"actions", actions}};
    return out;
}

}  // namespace drawspace::maze
