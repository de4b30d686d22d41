// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cmath>
#include <semaphore>
#include <thread>

#include <fmt/format.h>

#include "httplib.h"

#include "drawspace/error.hpp"
#include "drawspace/remote_policy.hpp"

namespace drawspace::episode {

namespace {

std::string base64(const std::vector<std::uint8_t>& bytes) {
    static constexpr char kAlphabet[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += kAlphabet[n & 63];
    }
    if (i < bytes.size()) {
        std::uint32_t n = bytes[i] << 16;
        if (i + 1 < bytes.size()) n |= bytes[i + 1] << 8;
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

class RemotePolicy final : public PolicyPort {
public:
    explicit RemotePolicy(RemotePolicyConfig config)
        : config_(std::move(config)), in_flight_(config_.max_in_flight) {}

    std::string next(const Conversation& conversation) override {
        const std::string body = build_chat_request(conversation, config_).dump();
        std::string last_error;
        auto delay = std::chrono::duration<double, std::milli>(config_.backoff_initial_ms);
        for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
            const auto outcome = post(body);
            if (outcome.ok) return parse_chat_response(outcome.body);
            last_error = outcome.error;
            if (!outcome.transient) break;
            if (attempt < config_.max_attempts) {
                std::this_thread::sleep_for(delay);
                delay *= config_.backoff_multiplier;
            }
        }
        throw Error(ErrorCode::Policy, fmt::format("policy endpoint {}{} failed: {}",
                                                   config_.base_url, config_.path, last_error));
    }

    bool stochastic() const noexcept override { return config_.temperature > 0.0; }

private:
    struct Outcome {
        bool ok = false;
        bool transient = false;
        std::string body;
        std::string error;
    };

    Outcome post(const std::string& body) {
        in_flight_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{in_flight_};

        httplib::Client client(config_.base_url);
        const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double>(config_.timeout_seconds));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = client.Post(config_.path, headers, body, "application/json");
        if (!res) return {false, true, {}, httplib::to_string(res.error())};
        if (res->status >= 200 && res->status < 300) return {true, false, res->body, {}};
        const bool transient = res->status >= 500 || res->status == 429 || res->status == 408;
        return {false, transient, {}, fmt::format("HTTP {}", res->status)};
    }

    RemotePolicyConfig config_;
    std::counting_semaphore<> in_flight_;
};

}  // namespace

void RemotePolicyConfig::validate() const {
    if (max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "max_attempts must be >= 1");
    if (max_in_flight < 1) throw Error(ErrorCode::InvalidConfig, "max_in_flight must be >= 1");
    if (!(timeout_seconds > 0)) throw Error(ErrorCode::InvalidConfig, "timeout must be positive");
    if (backoff_initial_ms < 0 || !(backoff_multiplier >= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "backoff must be non-negative and non-shrinking");
    }
}

nlohmann::json build_chat_request(const Conversation& conversation,
                                  const RemotePolicyConfig& config) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& msg : conversation.messages) {
        nlohmann::json content = nlohmann::json::array();
        for (const auto& part : msg.parts) {
            if (part.image_index) {
                if (!conversation.images) {
                    throw Error(ErrorCode::Policy, "conversation has image parts but no registry");
                }
                content.push_back(
                    {{"type", "image_url"},
                     {"image_index", *part.image_index},
                     {"image_url",
                      {{"url", "data:image/png;base64," +
                                   base64(conversation.images->png(*part.image_index))}}}});
            } else {
                content.push_back({{"type", "text"}, {"text", part.text}});
            }
        }
        messages.push_back({{"role", to_string(msg.role)}, {"content", std::move(content)}});
    }
    return {{"model", config.model},
            {"temperature", config.temperature},
            {"seed", conversation.seed},
            {"messages", std::move(messages)}};
}

std::string parse_chat_response(std::string_view body) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_object()) {
        if (j.contains("text") && j["text"].is_string()) return j["text"].get<std::string>();
        if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
            const auto& choice = j["choices"][0];
            if (choice.contains("message") && choice["message"].contains("content") &&
                choice["message"]["content"].is_string()) {
                return choice["message"]["content"].get<std::string>();
            }
        }
    }
    throw Error(ErrorCode::Policy, "policy endpoint returned an unrecognised body");
}

std::shared_ptr<PolicyPort> remote_policy(const RemotePolicyConfig& config) {
    config.validate();
    return std::make_shared<RemotePolicy>(config);
}

}  // namespace drawspace::episode
