// SPDX-License-Identifier: Apache-2.0
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "drawspace/error.hpp"
#include "drawspace/evalharness.hpp"
#include "drawspace/reflect.hpp"

namespace drawspace::eval {

namespace {

double mean(double sum, std::size_t n) { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

nlohmann::json opt(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

BehaviorStats behavior_stats(std::span<const episode::EpisodeTrace> traces) {
    BehaviorStats s;
    if (traces.empty()) return s;
    std::size_t reflective = 0;
    std::size_t steps = 0;
    std::size_t boxes = 0;
    std::size_t lines = 0;
    for (const auto& t : traces) {
        if (reflect::detect_reflection(t)) ++reflective;
        steps += t.steps.size();
        for (const auto& step : t.steps) {
            for (const auto& rec : step.ops) {
                if (rec.op.kind() == dsl::OpKind::Box) ++boxes;
                else ++lines;
            }
        }
    }
    s.reflection_ratio = mean(static_cast<double>(reflective), traces.size());
    s.mean_steps = mean(static_cast<double>(steps), traces.size());
    s.mean_box_ops = mean(static_cast<double>(boxes), traces.size());
    s.mean_line_ops = mean(static_cast<double>(lines), traces.size());
    return s;
}

EvalReport evaluate(std::span<const episode::EpisodeTrace> traces, std::span<const Task> tasks,
                    const reward::ConfidenceLadder& ladder) {
    std::unordered_map<std::string, const Task*> by_id;
    for (const auto& task : tasks) {
        if (!by_id.emplace(task.id, &task).second) {
            throw Error(ErrorCode::Join, fmt::format("duplicate task id '{}'", task.id));
        }
    }
    std::unordered_map<std::string, const episode::EpisodeTrace*> seen;
    for (const auto& trace : traces) {
        if (!by_id.contains(trace.task_id)) {
            throw Error(ErrorCode::Join, fmt::format("trace for unknown task '{}'", trace.task_id));
        }
        if (!seen.emplace(trace.task_id, &trace).second) {
            throw Error(ErrorCode::Join, fmt::format("repeated trace for task '{}'", trace.task_id));
        }
    }
    for (const auto& task : tasks) {
        if (!seen.contains(task.id)) {
            throw Error(ErrorCode::Join, fmt::format("no trace for task '{}'", task.id));
        }
    }

    EvalReport report;
    report.items = tasks.size();
    bool any_subtask = false;
    for (const auto& task : tasks) any_subtask = any_subtask || task.subtask.has_value();

    std::map<std::string, std::pair<double, std::size_t>> groups;
    double item_sum = 0.0;
    double choice_sum = 0.0;
    double numeric_sum = 0.0;
    std::size_t choice_n = 0;
    std::size_t numeric_n = 0;
    for (const auto& task : tasks) {
        const auto* trace = seen.at(task.id);
        const double s = reward::score_correct(task, trace->final_answer, ladder);
        item_sum += s;
        if (task.type == dsl::QuestionType::Choice) {
            choice_sum += s;
            ++choice_n;
        } else {
            numeric_sum += s;
            ++numeric_n;
        }
        if (any_subtask) {
            auto& g = groups[task.subtask.value_or("(none)")];
            g.first += s;
            ++g.second;
        }
    }
    if (choice_n > 0) report.choice_accuracy = mean(choice_sum, choice_n);
    if (numeric_n > 0) report.numeric_mra = mean(numeric_sum, numeric_n);

    if (any_subtask) {
        double sum = 0.0;
        for (const auto& [name, g] : groups) {
            report.subtasks.push_back({name, g.second, mean(g.first, g.second)});
            sum += report.subtasks.back().score;
        }
        report.overall = mean(sum, report.subtasks.size());
    } else {
        report.overall = mean(item_sum, tasks.size());
    }
    report.behavior = behavior_stats(traces);
    return report;
}

double pass_at_k(const std::vector<std::vector<bool>>& attempts, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidConfig, "pass@k needs k >= 1");
    if (attempts.empty()) return 0.0;
    std::size_t passed = 0;
    for (std::size_t i = 0; i < attempts.size(); ++i) {
        const auto& a = attempts[i];
        if (a.size() < k) {
            throw Error(ErrorCode::InsufficientAttempts,
                        fmt::format("task {} has {} attempt(s), need {}", i, a.size(), k));
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (a[j]) {
                ++passed;
                break;
            }
        }
    }
    return mean(static_cast<double>(passed), attempts.size());
}

bool attempt_correct(const episode::EpisodeTrace& trace, const Task& task, double numeric_cut,
                     const reward::ConfidenceLadder& ladder) {
    reflect::RrsOptions options;
    options.numeric_cut = numeric_cut;
    options.ladder = ladder;
    return reflect::answer_correct(trace, task, options);
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["overall"] = overall;
    j["items"] = items;
    j["choice_accuracy"] = opt(choice_accuracy);
    j["numeric_mra"] = opt(numeric_mra);
    j["subtasks"] = nlohmann::json::array();
    for (const auto& s : subtasks) {
        j["subtasks"].push_back({{"name", s.name}, {"count", s.count}, {"score", s.score}});
    }
    j["behavior"] = {{"reflection_ratio", behavior.reflection_ratio},
                     {"mean_steps", behavior.mean_steps},
                     {"mean_box_ops", behavior.mean_box_ops},
                     {"mean_line_ops", behavior.mean_line_ops}};
    auto pass = nlohmann::json::object();
    for (const auto& [k, v] : pass_at) pass[fmt::format("pass@{}", k)] = v;
    j["pass_at_k"] = pass;
    return j;
}

std::string EvalReport::to_table() const {
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& s : subtasks) {
        rows.emplace_back(fmt::format("{} (n={})", s.name, s.count), fmt::format("{:.4f}", s.score));
    }
    rows.emplace_back(fmt::format("overall (n={})", items), fmt::format("{:.4f}", overall));
    if (choice_accuracy) rows.emplace_back("choice accuracy", fmt::format("{:.4f}", *choice_accuracy));
    if (numeric_mra) rows.emplace_back("numeric MRA", fmt::format("{:.4f}", *numeric_mra));
    for (const auto& [k, v] : pass_at) rows.emplace_back(fmt::format("pass@{}", k), fmt::format("{:.4f}", v));
    rows.emplace_back("reflection ratio", fmt::format("{:.4f}", behavior.reflection_ratio));
    rows.emplace_back("mean steps", fmt::format("{:.3f}", behavior.mean_steps));
    rows.emplace_back("mean box ops", fmt::format("{:.3f}", behavior.mean_box_ops));
    rows.emplace_back("mean line ops", fmt::format("{:.3f}", behavior.mean_line_ops));

    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.first.size());
    std::string out = fmt::format("{:<{}}  {:>8}\n{}\n", "metric", width, "value", std::string(width + 10, '-'));
    for (const auto& [name, value] : rows) out += fmt::format("{:<{}}  {:>8}\n", name, width, value);
    return out;
}

}  // namespace drawspace::eval
