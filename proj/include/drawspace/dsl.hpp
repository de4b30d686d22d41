// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "drawspace/canvas.hpp"

namespace drawspace::dsl {

enum class OpKind { Box, Line };

std::string_view to_string(OpKind kind) noexcept;

using Geometry = std::variant<canvas::BBoxGeometry, canvas::PolylineGeometry>;

/// One drawing call: target image (1-based), coordinates and label. The
/// kind is implied by the geometry alternative.
struct DrawOperation {
    int image_index = 1;
    Geometry geometry;
    std::string label;

    [[nodiscard]] OpKind kind() const noexcept {
        return std::holds_alternative<canvas::BBoxGeometry>(geometry) ? OpKind::Box
                                                                       : OpKind::Line;
    }

    friend bool operator==(const DrawOperation&, const DrawOperation&) = default;
};

/// Equality on (kind, image index, exact coordinates, normalized label).
bool canonical_equal(const DrawOperation& a, const DrawOperation& b);

struct PolicyResponse {
    std::string thought;
    std::vector<DrawOperation> ops;
    std::optional<std::string> final_answer;

    friend bool operator==(const PolicyResponse&, const PolicyResponse&) = default;
};

enum class QuestionType { Choice, Numeric };

std::string_view to_string(QuestionType type) noexcept;
QuestionType question_type_from_string(std::string_view text);

struct FinalAnswer {
    std::string raw;
    std::optional<char> choice;
    std::optional<double> number;

    [[nodiscard]] bool parsed() const noexcept { return choice || number; }

    friend bool operator==(const FinalAnswer&, const FinalAnswer&) = default;
};

/// Opening and closing fence lines of an operation block.
inline constexpr std::string_view kOpsFence = "```draw";
inline constexpr std::string_view kFenceClose = "```";
/// Case-insensitive marker that starts a final-answer line.
inline constexpr std::string_view kAnswerMarker = "Answer:";

/// Splits a raw policy reply into thought, operation records and final
/// answer. Throws ParseError (with line/column) for malformed records or
/// unterminated blocks, and Error{AmbiguousResponse} when both operations
/// and an answer are present. Never throws anything else.
PolicyResponse parse_response(std::string_view text);

/// Canonical text form; parse_response(serialize_response(r)) == r for any
/// response whose thought is trimmed and contains no fence or answer lines.
std::string serialize_response(const PolicyResponse& resp);

/// Formats one operation record line (no trailing newline).
std::string format_op(const DrawOperation& op);
/// Parses one operation record line. `line_no` only feeds error locations.
DrawOperation parse_op(std::string_view line, std::size_t line_no = 1);

/// Rule-based answer extraction. Choice: the first standalone option letter
/// (uppercase preferred, lowercase accepted when no uppercase one exists),
/// limited to the first `option_count` letters. Numeric: the first real
/// number. Throws Error{UnparseableAnswer} when nothing is found.
FinalAnswer extract_answer(std::string_view final_text, QuestionType type,
                           int option_count = 26);

/// Like extract_answer but returns an unparsed FinalAnswer instead of throwing.
FinalAnswer try_extract_answer(std::string_view final_text, QuestionType type,
                               int option_count = 26);

nlohmann::json op_to_json(const DrawOperation& op);
DrawOperation op_from_json(const nlohmann::json& j);

}  // namespace drawspace::dsl
