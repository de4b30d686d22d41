// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace drawspace {

enum class ErrorCode {
    InvalidDimension,
    DegenerateGeometry,
    InsufficientPoints,
    Decode,
    Encode,
    Parse,
    AmbiguousResponse,
    UnparseableAnswer,
    InvalidConfig,
    Policy,
    GroupTooSmall,
    Shape,
    Alignment,
    InvalidSize,
    Io,
    Load,
    Join,
    InsufficientAttempts,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base of every error thrown by the library. The code identifies the
/// failure class; what() carries a human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse failure with a 1-based line/column location into the input text.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(ErrorCode::Parse, message), line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace drawspace
