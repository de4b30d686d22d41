// SPDX-License-Identifier: Apache-2.0
// Command-line entry point: dataset generation, rollouts, scoring, RRS
// filtering, GRPO advantages and benchmark evaluation.

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "drawspace/error.hpp"
#include "drawspace/evalharness.hpp"
#include "drawspace/grpo.hpp"
#include "drawspace/maze.hpp"
#include "drawspace/reflect.hpp"
#include "drawspace/remote_policy.hpp"
#include "drawspace/reward.hpp"
#include "drawspace/runner.hpp"
#include "drawspace/trace_io.hpp"

namespace fs = std::filesystem;
using namespace drawspace;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Settings shared by several subcommands. Each field can come from the
// config file or a flag; flags win.
struct Settings {
    std::string config;
    std::uint64_t seed = 0;
    int parallel = 1;
    double beta = 0.0;
    double epsilon = grpo::kDefaultClipEpsilon;
    double numeric_cut = 0.5;
    std::vector<double> ladder;
    episode::EpisodeConfig episode;
    episode::RemotePolicyConfig remote;
};

reward::ConfidenceLadder make_ladder(const Settings& s) {
    return s.ladder.empty() ? reward::ConfidenceLadder{} : reward::ConfidenceLadder{s.ladder};
}

void add_common(CLI::App* sub, Settings& s) {
    sub->add_option("--config", s.config, "flat key = value file; flags override it")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", s.seed, "master seed");
    sub->add_option("--parallel", s.parallel, "worker threads")->check(CLI::Range(1, 256));
}

void add_reward_flags(CLI::App* sub, Settings& s) {
    sub->add_option("--beta", s.beta, "correctness gate");
    sub->add_option("--ladder", s.ladder, "MRA confidence thresholds")->delimiter(',');
}

// Applies config-file entries to options of `sub` that were not given on
// the command line. Keys may use '_' or '-'. Keys unknown to every
// subcommand are rejected; keys for other subcommands are ignored.
void apply_config(CLI::App& app, CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::Error& e) {
        throw UsageError(fmt::format("config {}: {}", path, e.what()));
    }
    for (const auto& item : items) {
        std::string name = item.name;
        std::replace(name.begin(), name.end(), '_', '-');
        if (name == "config") throw UsageError("config files cannot nest");
        const std::string flag = "--" + name;
        bool known = false;
        for (const auto* other : app.get_subcommands({})) {
            known = known || other->get_option_no_throw(flag) != nullptr;
        }
        if (!known) throw UsageError(fmt::format("config {}: unknown key '{}'", path, item.name));
        auto* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr || opt->count() > 0) continue;
        try {
            for (const auto& v : item.inputs) opt->add_result(v);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError(fmt::format("config {}: {}", path, e.what()));
        }
    }
}

std::vector<nlohmann::json> read_records(const fs::path& path) { return episode::read_jsonl(path); }

std::unordered_map<std::string, const Task*> index_tasks(const std::vector<Task>& tasks) {
    std::unordered_map<std::string, const Task*> out;
    for (const auto& t : tasks) out.emplace(t.id, &t);
    return out;
}

const Task& find_task(const std::unordered_map<std::string, const Task*>& by_id, const std::string& id) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::Join, fmt::format("trace for unknown task '{}'", id));
    return *it->second;
}

// -- gen-maze -------------------------------------------------------------

struct GenArgs {
    std::vector<int> sizes{3, 4, 5, 6};
    std::vector<int> counts{125};
    std::string out;
};

int cmd_gen_maze(const GenArgs& a, const Settings& s) {
    if (a.counts.size() != 1 && a.counts.size() != a.sizes.size()) {
        throw UsageError("--counts takes one value or one per size");
    }
    std::map<int, int> counts;
    for (std::size_t i = 0; i < a.sizes.size(); ++i) {
        const int c = a.counts.size() == 1 ? a.counts[0] : a.counts[i];
        if (c < 0) throw UsageError("counts must be non-negative");
        if (!counts.emplace(a.sizes[i], c).second) throw UsageError("repeated size in --sizes");
    }
    const auto manifest = maze::emit_dataset(counts, s.seed, a.out, s.parallel);
    fmt::print("wrote {} records to {} (digest {})\n", manifest.records, a.out, manifest.dataset_digest);
    return kExitOk;
}

// -- run ------------------------------------------------------------------

struct RunArgs {
    std::string tasks;
    std::string policy = "oracle";
    std::string answer;
    std::string replay;
    double hit_rate = 0.5;
    std::size_t attempts = 1;
    std::string out;
};

int cmd_run(const RunArgs& a, const Settings& s) {
    const auto tasks = eval::load_tasks(a.tasks);
    runner::PolicyFactory factory;
    if (a.policy == "oracle") {
        factory = [](const Task& t, std::size_t) { return runner::maze_oracle_for(t); };
    } else if (a.policy == "fixed") {
        if (a.answer.empty()) throw UsageError("--policy fixed needs --answer");
        factory = [reply = "Answer: " + a.answer](const Task&, std::size_t) {
            return runner::fixed_policy(reply);
        };
    } else if (a.policy == "replay") {
        if (a.replay.empty()) throw UsageError("--policy replay needs --replay");
        auto scripts = std::make_shared<const std::map<std::string, std::vector<std::string>>>(
            runner::load_replays(a.replay));
        factory = [scripts](const Task& t, std::size_t) {
            const auto it = scripts->find(t.id);
            return runner::replay_policy(it == scripts->end() ? std::vector<std::string>{} : it->second);
        };
    } else if (a.policy == "coin") {
        factory = [p = a.hit_rate](const Task& t, std::size_t) { return runner::coin_policy(t, p); };
    } else if (a.policy == "remote") {
        auto shared = episode::remote_policy(s.remote);
        factory = [shared](const Task&, std::size_t) { return shared; };
    } else {
        throw UsageError(fmt::format("unknown policy '{}'", a.policy));
    }

    runner::RunOptions options;
    options.episode = s.episode;
    options.seed = s.seed;
    options.parallel = s.parallel;
    options.attempts = a.attempts;
    options.beta = s.beta;
    options.ladder = make_ladder(s);
    const auto outcome = runner::run_batch(tasks, factory, options, fs::path(a.out));

    fmt::print("{} episodes, mean reward {:.4f}\n", outcome.summary.episodes, outcome.summary.mean_total);
    for (const auto& [name, n] : outcome.summary.terminations) fmt::print("  {:<14}{}\n", name, n);
    if (outcome.summary.policy_errors > 0) {
        fmt::print(stderr, "{} episode(s) ended with a policy error\n", outcome.summary.policy_errors);
        return kExitRuntime;
    }
    return kExitOk;
}

// -- score ----------------------------------------------------------------

struct IoArgs {
    std::string tasks;
    std::string traces;
    std::string in;
    std::string out;
    std::string report;
    std::vector<std::size_t> ks{1};
};

int cmd_score(const IoArgs& a, const Settings& s) {
    const auto tasks = eval::load_tasks(a.tasks, false);
    const auto by_id = index_tasks(tasks);
    const auto ladder = make_ladder(s);
    std::vector<nlohmann::json> out;
    double sum = 0.0;
    for (const auto& rec : read_records(a.traces)) {
        const auto trace = episode::trace_from_json(rec);
        const auto r = reward::total_reward(trace, find_task(by_id, trace.task_id), s.beta, ladder);
        sum += r.total;
        out.push_back({{"task_id", trace.task_id},
                       {"attempt", rec.value("attempt", 0)},
                       {"termination", episode::to_string(trace.termination)},
                       {"reward", reward::to_json(r)}});
    }
    episode::write_jsonl(a.out, out);
    fmt::print("scored {} traces, mean reward {:.4f}\n", out.size(),
               out.empty() ? 0.0 : sum / static_cast<double>(out.size()));
    return kExitOk;
}

// -- filter-rrs -----------------------------------------------------------

int cmd_filter_rrs(const IoArgs& a, const Settings& s) {
    const auto tasks = eval::load_tasks(a.tasks, false);
    const auto by_id = index_tasks(tasks);
    reflect::RrsOptions options;
    options.beta = s.beta;
    options.numeric_cut = s.numeric_cut;
    options.ladder = make_ladder(s);

    std::vector<nlohmann::json> accepted;
    std::map<std::string, std::size_t> rejected;
    std::size_t total = 0;
    for (const auto& rec : read_records(a.traces)) {
        ++total;
        const auto trace = episode::trace_from_json(rec);
        const Task& task = find_task(by_id, trace.task_id);
        if (reflect::rrs_filter(trace, task, options) == reflect::RrsDecision::Accept) {
            accepted.push_back(rec);
        } else if (trace.termination != episode::Termination::Answered) {
            ++rejected["not-answered"];
        } else if (!reflect::answer_correct(trace, task, options)) {
            ++rejected["incorrect"];
        } else if (reward::score_format(trace) != 1) {
            ++rejected["format"];
        } else {
            ++rejected["no-reflection"];
        }
    }
    episode::write_jsonl(a.out, accepted);
    const nlohmann::json report = {{"total", total},
                                   {"accepted", accepted.size()},
                                   {"rejected", total - accepted.size()},
                                   {"rejected_by", rejected}};
    if (!a.report.empty()) episode::write_file(a.report, report.dump(2) + "\n");
    fmt::print("{}\n", report.dump(2));
    return kExitOk;
}

// -- advantages -----------------------------------------------------------

int cmd_advantages(const IoArgs& a, const Settings&) {
    std::vector<nlohmann::json> out;
    const auto rows = read_records(a.in);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<double> scores;
        try {
            scores = rows[i].at("scores").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Load, fmt::format("{}: row {}: {}", a.in, i + 1, e.what()));
        }
        out.push_back({{"group", rows[i].value("group", nlohmann::json(i))},
                       {"advantages", grpo::group_advantages(scores)}});
    }
    episode::write_jsonl(a.out, out);
    fmt::print("wrote advantages for {} groups\n", out.size());
    return kExitOk;
}

// -- eval -----------------------------------------------------------------

int cmd_eval(const IoArgs& a, const Settings& s) {
    const auto tasks = eval::load_tasks(a.tasks, false);
    const auto by_id = index_tasks(tasks);
    const auto ladder = make_ladder(s);

    // First attempt per task feeds the report; all attempts feed pass@k.
    std::vector<episode::EpisodeTrace> first;
    std::unordered_map<std::string, std::vector<bool>> hits;
    for (const auto& rec : read_records(a.traces)) {
        auto trace = episode::trace_from_json(rec);
        const Task& task = find_task(by_id, trace.task_id);
        auto& h = hits[trace.task_id];
        h.push_back(eval::attempt_correct(trace, task, s.numeric_cut, ladder));
        if (h.size() == 1) first.push_back(std::move(trace));
    }
    auto report = eval::evaluate(first, tasks, ladder);
    std::vector<std::vector<bool>> matrix;
    for (const auto& t : tasks) matrix.push_back(hits.at(t.id));
    for (const auto k : a.ks) report.pass_at.emplace_back(k, eval::pass_at_k(matrix, k));

    episode::write_file(a.out, report.to_json().dump(2) + "\n");
    fmt::print("{}", report.to_table());
    return kExitOk;
}

void apply_settings(Settings& s) {
    s.episode.validate();
    s.remote.validate();
    if (!(s.beta >= 0.0 && s.beta < 1.0)) throw UsageError("--beta must lie in [0, 1)");
    if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
    (void)make_ladder(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drawspace: drawing-based spatial reasoning environment"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "drawspace 0.1.0");

    Settings s;
    GenArgs gen;
    RunArgs run;
    IoArgs io;

    auto* gen_cmd = app.add_subcommand("gen-maze", "generate a maze QA dataset with oracle traces");
    add_common(gen_cmd, s);
    gen_cmd->add_option("--sizes", gen.sizes, "grid sizes")->delimiter(',')->check(CLI::Range(3, 6));
    gen_cmd->add_option("--counts", gen.counts, "tasks per size (one value or one per size)")->delimiter(',');
    gen_cmd->add_option("--out", gen.out, "output directory")->required();

    auto* run_cmd = app.add_subcommand("run", "roll out a policy over a task file");
    add_common(run_cmd, s);
    add_reward_flags(run_cmd, s);
    run_cmd->add_option("--tasks", run.tasks, "task JSONL")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--policy", run.policy, "oracle | fixed | replay | coin | remote")
        ->check(CLI::IsMember({"oracle", "fixed", "replay", "coin", "remote"}));
    run_cmd->add_option("--answer", run.answer, "answer text for --policy fixed");
    run_cmd->add_option("--replay", run.replay, "replies JSONL for --policy replay");
    run_cmd->add_option("--hit-rate", run.hit_rate, "success probability for --policy coin")
        ->check(CLI::Range(0.0, 1.0));
    run_cmd->add_option("--attempts", run.attempts, "attempts per task")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", run.out, "output directory")->required();
    run_cmd->add_option("--alpha", s.episode.alpha, "maximum images per episode");
    run_cmd->add_option("--max-steps", s.episode.max_steps, "maximum reasoning steps");
    run_cmd->add_option("--frame-budget", s.episode.frame_budget, "frames kept from video inputs");
    run_cmd->add_option("--endpoint", s.remote.base_url, "policy server base URL");
    run_cmd->add_option("--endpoint-path", s.remote.path, "chat completions path");
    run_cmd->add_option("--model", s.remote.model, "model name sent to the server");
    run_cmd->add_option("--api-key", s.remote.api_key, "bearer token");
    run_cmd->add_option("--temperature", s.remote.temperature, "sampling temperature");
    run_cmd->add_option("--timeout", s.remote.timeout_seconds, "per-request timeout in seconds");
    run_cmd->add_option("--max-attempts", s.remote.max_attempts, "HTTP attempts per request");
    run_cmd->add_option("--max-in-flight", s.remote.max_in_flight, "concurrent HTTP requests");

    auto* score_cmd = app.add_subcommand("score", "re-score traces");
    add_common(score_cmd, s);
    add_reward_flags(score_cmd, s);
    score_cmd->add_option("--tasks", io.tasks, "task JSONL")->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--traces", io.traces, "trace JSONL")->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--out", io.out, "scores JSONL")->required();

    auto* rrs_cmd = app.add_subcommand("filter-rrs", "keep correct, well-formed, reflective traces");
    add_common(rrs_cmd, s);
    add_reward_flags(rrs_cmd, s);
    rrs_cmd->add_option("--numeric-cut", s.numeric_cut, "MRA needed for a numeric answer to count")
        ->check(CLI::Range(0.0, 1.0));
    rrs_cmd->add_option("--tasks", io.tasks, "task JSONL")->required()->check(CLI::ExistingFile);
    rrs_cmd->add_option("--traces", io.traces, "trace JSONL")->required()->check(CLI::ExistingFile);
    rrs_cmd->add_option("--out", io.out, "accepted traces JSONL")->required();
    rrs_cmd->add_option("--report", io.report, "acceptance report JSON");

    auto* adv_cmd = app.add_subcommand("advantages", "group-normalised advantages");
    add_common(adv_cmd, s);
    adv_cmd->add_option("--epsilon", s.epsilon, "surrogate clip range (validated, recorded)");
    adv_cmd->add_option("--in", io.in, "JSONL of {group, scores}")->required()->check(CLI::ExistingFile);
    adv_cmd->add_option("--out", io.out, "JSONL of {group, advantages}")->required();

    auto* eval_cmd = app.add_subcommand("eval", "benchmark report");
    add_common(eval_cmd, s);
    add_reward_flags(eval_cmd, s);
    eval_cmd->add_option("--numeric-cut", s.numeric_cut, "MRA needed for a numeric pass@k hit")
        ->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--tasks", io.tasks, "task JSONL")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--traces", io.traces, "trace JSONL")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--out", io.out, "report JSON")->required();
    eval_cmd->add_option("--k", io.ks, "pass@k values")->delimiter(',')->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        apply_config(app, sub, s.config);
        apply_settings(s);
        const std::string name = sub->get_name();
        if (name == "gen-maze") return cmd_gen_maze(gen, s);
        if (name == "run") return cmd_run(run, s);
        if (name == "score") return cmd_score(io, s);
        if (name == "filter-rrs") return cmd_filter_rrs(io, s);
        if (name == "advantages") return cmd_advantages(io, s);
        return cmd_eval(io, s);
    } catch (const UsageError& e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        fmt::print(stderr, "error [{}]: {}\n", to_string(e.code()), e.what());
        return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitRuntime;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitRuntime;
    }
}
