// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"

#include "drawspace/episode.hpp"

namespace drawspace::episode {

/// Chat endpoint settings. The request body follows the OpenAI chat
/// completions layout; images travel as PNG data URLs tagged with their
/// registry index.
struct RemotePolicyConfig {
    std::string base_url = "http://127.0.0.1:8000";
    std::string path = "/v1/chat/completions";
    std::string model = "policy";
    std::string api_key;
    double temperature = 0.0;
    double timeout_seconds = 120.0;
    /// Total attempts per request, including the first one.
    int max_attempts = 3;
    int backoff_initial_ms = 500;
    double backoff_multiplier = 2.0;
    /// Upper bound on concurrent HTTP requests across all episodes
    /// sharing the client.
    int max_in_flight = 4;

    void validate() const;
};

nlohmann::json build_chat_request(const Conversation& conversation,
                                  const RemotePolicyConfig& config);

/// Reply text from either {"choices":[{"message":{"content":...}}]} or
/// {"text": ...}. Throws Error{Policy} for anything else.
std::string parse_chat_response(std::string_view body);

/// Shareable client: safe to call next() from many episode threads.
std::shared_ptr<PolicyPort> remote_policy(const RemotePolicyConfig& config);

}  // namespace drawspace::episode
