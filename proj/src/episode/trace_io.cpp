// SPDX-License-Identifier: Apache-2.0
#include <fstream>

#include <fmt/format.h>

#include "drawspace/error.hpp"
#include "drawspace/trace_io.hpp"

namespace drawspace::episode {

namespace {

nlohmann::json op_record_to_json(const OpRecord& rec) {
    auto j = dsl::op_to_json(rec.op);
    j["executed"] = rec.executed;
    j["output"] = rec.output_index ? nlohmann::json(*rec.output_index) : nlohmann::json();
    j["error"] = rec.error.empty() ? nlohmann::json() : nlohmann::json(rec.error);
    return j;
}

OpRecord op_record_from_json(const nlohmann::json& j) {
    OpRecord rec;
    rec.op = dsl::op_from_json(j);
    rec.executed = j.value("executed", false);
    if (j.contains("output") && !j["output"].is_null()) rec.output_index = j["output"].get<int>();
    if (j.contains("error") && !j["error"].is_null()) rec.error = j["error"].get<std::string>();
    return rec;
}

}  // namespace

std::string path_safe(std::string_view id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

nlohmann::json trace_to_json(const EpisodeTrace& trace, const std::vector<std::string>& image_paths) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        nlohmann::json ops = nlohmann::json::array();
        for (const auto& rec : s.ops) ops.push_back(op_record_to_json(rec));
        steps.push_back({{"response", s.response},
                         {"thought", s.thought},
                         {"ops", std::move(ops)},
                         {"observations", s.observations},
                         {"parse_error", s.parse_error ? nlohmann::json(*s.parse_error) : nlohmann::json()},
                         {"final_prompt", s.final_prompt}});
    }
    nlohmann::json registry = nlohmann::json::array();
    for (std::size_t i = 0; i < trace.registry.size(); ++i) {
        const auto& p = trace.registry[i];
        nlohmann::json entry = {{"index", i + 1}};
        if (p.source == Provenance::Source::Input) {
            entry["source"] = "input";
            entry["input"] = p.input;
        } else {
            entry["source"] = "op";
            entry["step"] = p.step;
            entry["op"] = p.op;
        }
        if (i < image_paths.size()) entry["path"] = image_paths[i];
        registry.push_back(std::move(entry));
    }
    nlohmann::json answer;
    if (trace.final_answer) {
        const auto& a = *trace.final_answer;
        answer = {{"raw", a.raw},
                  {"choice", a.choice ? nlohmann::json(std::string(1, *a.choice)) : nlohmann::json()},
                  {"number", a.number ? nlohmann::json(*a.number) : nlohmann::json()}};
    }
    nlohmann::json j = {{"task_id", trace.task_id},
                        {"termination", to_string(trace.termination)},
                        {"final_answer", answer},
                        {"steps", std::move(steps)},
                        {"registry", std::move(registry)}};
    if (!trace.error.empty()) j["error"] = trace.error;
    return j;
}

EpisodeTrace trace_from_json(const nlohmann::json& j) {
    try {
        EpisodeTrace trace;
        trace.task_id = j.at("task_id").get<std::string>();
        trace.termination = termination_from_string(j.at("termination").get<std::string>());
        trace.error = j.value("error", std::string());
        const auto& answer = j.at("final_answer");
        if (!answer.is_null()) {
            dsl::FinalAnswer a;
            a.raw = answer.at("raw").get<std::string>();
            if (!answer.at("choice").is_null()) {
                const auto c = answer["choice"].get<std::string>();
                if (c.size() != 1) throw Error(ErrorCode::Parse, "choice must be one letter");
                a.choice = c[0];
            }
            if (!answer.at("number").is_null()) a.number = answer["number"].get<double>();
            trace.final_answer = std::move(a);
        }
        for (const auto& s : j.at("steps")) {
            Step step;
            step.response = s.value("response", std::string());
            step.thought = s.value("thought", std::string());
            for (const auto& op : s.at("ops")) step.ops.push_back(op_record_from_json(op));
            step.observations = s.value("observations", std::vector<int>{});
            if (s.contains("parse_error") && !s["parse_error"].is_null()) {
                step.parse_error = s["parse_error"].get<std::string>();
            }
            step.final_prompt = s.value("final_prompt", false);
            trace.steps.push_back(std::move(step));
        }
        for (const auto& e : j.value("registry", nlohmann::json::array())) {
            Provenance p;
            if (e.at("source").get<std::string>() == "input") {
                p.source = Provenance::Source::Input;
                p.input = e.at("input").get<int>();
            } else {
                p.source = Provenance::Source::Operation;
                p.step = e.at("step").get<int>();
                p.op = e.at("op").get<int>();
            }
            trace.registry.push_back(p);
        }
        return trace;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, fmt::format("malformed trace record: {}", e.what()));
    }
}

std::vector<std::string> save_registry_images(const ImageRegistry& registry,
                                              const std::filesystem::path& root,
                                              const std::string& rel_dir) {
    std::error_code ec;
    std::filesystem::create_directories(root / rel_dir, ec);
    if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create {}: {}", (root / rel_dir).string(), ec.message()));
    std::vector<std::string> paths;
    for (int i = 1; i <= registry.size(); ++i) {
        const std::string rel = fmt::format("{}/{}.png", rel_dir, i);
        const auto& bytes = registry.png(i);
        write_file(root / rel, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
        paths.push_back(rel);
    }
    return paths;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path.string()));
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse,
                        fmt::format("{}:{}: invalid JSON: {}", path.string(), line_no, e.what()));
        }
    }
    return out;
}

std::string to_jsonl(const std::vector<nlohmann::json>& records) {
    std::string out;
    for (const auto& r : records) {
        out += r.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
    write_file(path, to_jsonl(records));
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, fmt::format("short write to {}", path.string()));
}

}  // namespace drawspace::episode
