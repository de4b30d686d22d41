// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

#include <fmt/format.h>

#include "drawspace/dsl.hpp"
#include "drawspace/error.hpp"

namespace drawspace::dsl {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::optional<char> first_standalone_letter(std::string_view text, int option_count,
                                            bool uppercase) {
    const int span = std::clamp(option_count, 1, 26);
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const bool case_ok = uppercase ? (c >= 'A' && c <= 'Z') : (c >= 'a' && c <= 'z');
        if (!case_ok || upper - 'A' >= span) continue;
        const bool left_ok = i == 0 || !is_alnum(text[i - 1]);
        const bool right_ok = i + 1 == text.size() || !is_alnum(text[i + 1]);
        if (left_ok && right_ok) return upper;
    }
    return std::nullopt;
}

std::optional<double> first_number(std::string_view text) {
    static const std::regex number_re(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)");
    std::match_results<std::string_view::const_iterator> m;
    auto begin = text.begin();
    while (std::regex_search(begin, text.end(), m, number_re)) {
        std::string token = m.str();
        if (!token.empty() && token.front() == '+') token.erase(0, 1);
        double value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec == std::errc{} && ptr == token.data() + token.size() && std::isfinite(value)) {
            return value;
        }
        begin = m[0].second;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(QuestionType type) noexcept {
    return type == QuestionType::Choice ? "choice" : "numeric";
}

QuestionType question_type_from_string(std::string_view text) {
    if (text == "choice") return QuestionType::Choice;
    if (text == "numeric") return QuestionType::Numeric;
    throw Error(ErrorCode::Parse, fmt::format("unknown question type '{}'", text));
}

FinalAnswer extract_answer(std::string_view final_text, QuestionType type, int option_count) {
    FinalAnswer answer{std::string(final_text), std::nullopt, std::nullopt};
    if (type == QuestionType::Choice) {
        answer.choice = first_standalone_letter(final_text, option_count, true);
        if (!answer.choice) answer.choice = first_standalone_letter(final_text, option_count, false);
    } else {
        answer.number = first_number(final_text);
    }
    if (!answer.parsed()) {
        throw Error(ErrorCode::UnparseableAnswer,
                    fmt::format("no {} answer in '{}'", to_string(type), final_text));
    }
    return answer;
}

FinalAnswer try_extract_answer(std::string_view final_text, QuestionType type, int option_count) {
    try {
        return extract_answer(final_text, type, option_count);
    } catch (const Error&) {
        return FinalAnswer{std::string(final_text), std::nullopt, std::nullopt};
    }
}

}  // namespace drawspace::dsl
