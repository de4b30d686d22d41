// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "drawspace/episode.hpp"

namespace drawspace::episode {

/// JSON record for one episode. `image_paths`, when non-empty, holds one
/// path per registry entry (index order) and is stored with the provenance.
nlohmann::json trace_to_json(const EpisodeTrace& trace,
                             const std::vector<std::string>& image_paths = {});
EpisodeTrace trace_from_json(const nlohmann::json& j);

/// Writes every registry entry as `<root>/<rel_dir>/<index>.png` and
/// returns the paths relative to `root`.
std::vector<std::string> save_registry_images(const ImageRegistry& registry,
                                              const std::filesystem::path& root,
                                              const std::string& rel_dir);

/// Filesystem-safe rendering of a task id for use in paths.
std::string path_safe(std::string_view id);

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);
/// One compact JSON document per line, keys sorted.
std::string to_jsonl(const std::vector<nlohmann::json>& records);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace drawspace::episode
