// SPDX-License-Identifier: Apache-2.0
#include <fmt/format.h>

#include "drawspace/error.hpp"
#include "drawspace/hash.hpp"
#include "drawspace/maze.hpp"
#include "drawspace/parallel.hpp"
#include "drawspace/reflect.hpp"
#include "drawspace/reward.hpp"
#include "drawspace/trace_io.hpp"

namespace drawspace::maze {

namespace {

struct Emitted {
    nlohmann::json record;
    std::vector<std::uint8_t> png;
};

Emitted emit_one(int size, std::uint64_t task_seed, std::size_t index) {
    const auto task = gen_task(gen_maze(size, task_seed), task_seed);
    const std::string id = fmt::format("maze-{:05d}", index);
    const Task generic = to_task(task, id);

    auto policy = oracle_policy(task);
    const auto trace = episode::run_episode(*policy, generic, episode::EpisodeConfig{});
    const auto reward = reward::total_reward(trace, generic);
    if (reward.total != 2.0 ||
        reflect::cold_start_filter(trace, generic) != reflect::RrsDecision::Accept) {
        throw Error(ErrorCode::InvalidConfig,
                    fmt::format("oracle trace for {} scored {} ({})", id, reward.total,
                                episode::to_string(trace.termination)));
    }
    auto oracle = episode::trace_to_json(trace);
    oracle["reward"] = reward::to_json(reward);

    nlohmann::json actions = nlohmann::json::array();
    for (auto m : task.actions) actions.push_back(to_string(m));
    nlohmann::json record = {{"id", id},
                             {"grid_size", size},
                             {"seed", task_seed},
                             {"image_path", fmt::format("images/{}.png", id)},
                             {"question", task.question},
                             {"options", task.options},
                             {"answer", std::string(1, task.answer)},
                             {"actions", std::move(actions)},
                             {"oracle_trace", std::move(oracle)}};
    return {std::move(record), canvas::encode_png(generic.images.front())};
}

}  // namespace

nlohmann::json DatasetManifest::to_json() const {
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [size, n] : counts) c[std::to_string(size)] = n;
    return {{"seed", seed},       {"counts", c},
            {"records", records}, {"dataset", dataset_file},
            {"digest", dataset_digest}, {"self_checked", self_checked}};
}

DatasetManifest emit_dataset(const std::map<int, int>& counts, std::uint64_t seed,
                             const std::filesystem::path& out_dir, int parallel) {
    std::vector<int> sizes;
    for (const auto& [size, n] : counts) {
        if (size < kMinGrid || size > kMaxGrid) {
            throw Error(ErrorCode::InvalidSize, fmt::format("grid size {} not in [{}, {}]", size,
                                                            kMinGrid, kMaxGrid));
        }
        if (n < 0) throw Error(ErrorCode::InvalidConfig, "counts must be non-negative");
        sizes.insert(sizes.end(), static_cast<std::size_t>(n), size);
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir / "images", ec);
    if (ec) {
        throw Error(ErrorCode::Io, fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));
    }

    std::vector<Emitted> results(sizes.size());
    parallel_for(sizes.size(), parallel, [&](std::size_t i) {
        results[i] = emit_one(sizes[i], derive_seed(seed, i), i);
    });

    std::vector<nlohmann::json> records;
    std::uint64_t digest = fnv1a64(std::string_view{});
    for (auto& r : results) {
        const auto rel = r.record.at("image_path").get<std::string>();
        episode::write_file(out_dir / rel,
                            std::string_view(reinterpret_cast<const char*>(r.png.data()), r.png.size()));
        digest = fnv1a64(r.png, digest);
        records.push_back(std::move(r.record));
    }
    const std::string jsonl = episode::to_jsonl(records);
    episode::write_file(out_dir / "dataset.jsonl", jsonl);
    digest = fnv1a64(jsonl, digest);

    DatasetManifest manifest;
    manifest.seed = seed;
    manifest.counts = counts;
    manifest.records = records.size();
    manifest.dataset_file = "dataset.jsonl";
    manifest.dataset_digest = fmt::format("{:016x}", digest);
    manifest.self_checked = records.size();
    episode::write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
    return manifest;
}

}  // namespace drawspace::maze
