// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "drawspace/dsl.hpp"
#include "drawspace/error.hpp"
#include "drawspace/label.hpp"

namespace drawspace::dsl {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i]))) {
            return false;
        }
    }
    return true;
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Cursor over one record line that reports 1-based columns.
class RecordReader {
public:
    RecordReader(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(fmt::format("line {}, column {}: {}", line_no_, pos_ + 1, what), line_no_,
                         pos_ + 1);
    }

    bool at_end() const { return pos_ >= line_.size(); }

    std::size_t skip_space() {
        const auto start = pos_;
        while (!at_end() && is_space(line_[pos_])) ++pos_;
        return pos_ - start;
    }

    void require_space() {
        if (skip_space() == 0) fail("expected whitespace");
    }

    std::string_view word() {
        const auto start = pos_;
        while (!at_end() && !is_space(line_[pos_])) ++pos_;
        return line_.substr(start, pos_ - start);
    }

    void expect(std::string_view literal) {
        if (line_.substr(pos_, literal.size()) != literal) {
            fail(fmt::format("expected '{}'", literal));
        }
        pos_ += literal.size();
    }

    int image_index() {
        const auto token = word();
        int value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
            pos_ -= token.size();
            fail("image index must be a positive integer");
        }
        if (value < 1) {
            pos_ -= token.size();
            fail("image index must be >= 1");
        }
        return value;
    }

    double number(std::string_view token, std::size_t token_pos) const {
        double value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() ||
            !std::isfinite(value)) {
            RecordReader at = *this;
            at.pos_ = token_pos;
            at.fail(fmt::format("invalid coordinate '{}'", token));
        }
        return value;
    }

    std::vector<double> number_list(std::string_view token, std::size_t token_pos,
                                    std::size_t expected) const {
        std::vector<double> out;
        std::size_t start = 0;
        while (true) {
            const auto comma = token.find(',', start);
            const auto piece = token.substr(start, comma == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : comma - start);
            out.push_back(number(piece, token_pos + start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (out.size() != expected) {
            RecordReader at = *this;
            at.pos_ = token_pos;
            at.fail(fmt::format("expected {} comma-separated numbers, got {}", expected,
                                out.size()));
        }
        return out;
    }

    Geometry geometry(OpKind kind) {
        const auto token_pos = pos_;
        const auto token = word();
        if (token.empty()) fail("missing coordinates");
        if (kind == OpKind::Box) {
            const auto v = number_list(token, token_pos, 4);
            return canvas::BBoxGeometry{v[0], v[1], v[2], v[3]};
        }
        canvas::PolylineGeometry line;
        std::size_t start = 0;
        while (true) {
            const auto semi = token.find(';', start);
            const auto piece = token.substr(
                start, semi == std::string_view::npos ? std::string_view::npos : semi - start);
            const auto v = number_list(piece, token_pos + start, 2);
            line.points.push_back({v[0], v[1]});
            if (semi == std::string_view::npos) break;
            start = semi + 1;
        }
        return line;
    }

    std::string label() {
        if (at_end() || line_[pos_] != '"') fail("label must be a double-quoted string");
        const auto start = pos_;
        ++pos_;
        bool closed = false;
        while (!at_end()) {
            const char c = line_[pos_++];
            if (c == '\\') {
                if (at_end()) break;
                ++pos_;
            } else if (c == '"') {
                closed = true;
                break;
            }
        }
        if (!closed) {
            pos_ = start;
            fail("unterminated label string");
        }
        std::string value;
        try {
            value = nlohmann::json::parse(line_.substr(start, pos_ - start)).get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            pos_ = start;
            fail(fmt::format("invalid label string ({})", e.what()));
        }
        if (normalize_label(value).empty()) {
            pos_ = start;
            fail("label must not be blank");
        }
        return value;
    }

private:
    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(OpKind kind) noexcept { return kind == OpKind::Box ? "box" : "line"; }

bool canonical_equal(const DrawOperation& a, const DrawOperation& b) {
    return a.image_index == b.image_index && a.geometry == b.geometry &&
           normalize_label(a.label) == normalize_label(b.label);
}

std::string format_op(const DrawOperation& op) {
    std::string coords;
    if (const auto* box = std::get_if<canvas::BBoxGeometry>(&op.geometry)) {
        coords = fmt::format("{},{},{},{}", format_number(box->x1), format_number(box->y1),
                             format_number(box->x2), format_number(box->y2));
    } else {
        const auto& line = std::get<canvas::PolylineGeometry>(op.geometry);
        for (std::size_t i = 0; i < line.points.size(); ++i) {
            if (i) coords += ';';
            coords += format_number(line.points[i].x);
            coords += ',';
            coords += format_number(line.points[i].y);
        }
    }
    const auto label =
        nlohmann::json(op.label).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    return fmt::format("{} k={} p={} l={}", to_string(op.kind()), op.image_index, coords, label);
}

DrawOperation parse_op(std::string_view line, std::size_t line_no) {
    RecordReader r(line, line_no);
    r.skip_space();
    const auto kind_word = r.word();
    OpKind kind;
    if (kind_word == "box") {
        kind = OpKind::Box;
    } else if (kind_word == "line") {
        kind = OpKind::Line;
    } else {
        r.fail(fmt::format("unknown operation kind '{}'", kind_word));
    }
    DrawOperation op;
    r.require_space();
    r.expect("k=");
    op.image_index = r.image_index();
    r.require_space();
    r.expect("p=");
    op.geometry = r.geometry(kind);
    r.require_space();
    r.expect("l=");
    op.label = r.label();
    r.skip_space();
    if (!r.at_end()) r.fail("unexpected trailing text");
    return op;
}

PolicyResponse parse_response(std::string_view text) {
    PolicyResponse resp;
    std::vector<std::string_view> thought_lines;
    bool in_block = false;
    std::size_t block_line = 0;
    std::size_t answer_lines = 0;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos
                                                                    : nl - start);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto trimmed = trim(line);

        if (in_block) {
            if (trimmed == kFenceClose) {
                in_block = false;
            } else if (!trimmed.empty()) {
                resp.ops.push_back(parse_op(line, line_no));
            }
        } else if (trimmed == kOpsFence) {
            in_block = true;
            block_line = line_no;
        } else if (starts_with_icase(trimmed, kAnswerMarker)) {
            if (++answer_lines > 1) {
                throw Error(ErrorCode::AmbiguousResponse,
                            fmt::format("line {}: more than one answer marker", line_no));
            }
            resp.final_answer = std::string(trim(trimmed.substr(kAnswerMarker.size())));
        } else {
            thought_lines.push_back(line);
        }

        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    if (in_block) {
        throw ParseError(fmt::format("line {}: operation block is never closed", block_line),
                         block_line, 1);
    }
    if (!resp.ops.empty() && resp.final_answer) {
        throw Error(ErrorCode::AmbiguousResponse,
                    "response carries both drawing operations and a final answer");
    }

    std::string thought;
    for (std::size_t i = 0; i < thought_lines.size(); ++i) {
        if (i) thought += '\n';
        thought += thought_lines[i];
    }
    resp.thought = std::string(trim(thought));
    return resp;
}

std::string serialize_response(const PolicyResponse& resp) {
    std::string out = resp.thought;
    if (!resp.ops.empty()) {
        if (!out.empty()) out += '\n';
        out += kOpsFence;
        out += '\n';
        for (const auto& op : resp.ops) {
            out += format_op(op);
            out += '\n';
        }
        out += kFenceClose;
    }
    if (resp.final_answer) {
        if (!out.empty()) out += '\n';
        out += kAnswerMarker;
        if (!resp.final_answer->empty()) {
            out += ' ';
            out += *resp.final_answer;
        }
    }
    return out;
}

nlohmann::json op_to_json(const DrawOperation& op) {
    nlohmann::json p;
    if (const auto* box = std::get_if<canvas::BBoxGeometry>(&op.geometry)) {
        p = nlohmann::json::array({box->x1, box->y1, box->x2, box->y2});
    } else {
        p = nlohmann::json::array();
        for (const auto& pt : std::get<canvas::PolylineGeometry>(op.geometry).points) {
            p.push_back(nlohmann::json::array({pt.x, pt.y}));
        }
    }
    return {{"kind", to_string(op.kind())}, {"k", op.image_index}, {"p", p}, {"l", op.label}};
}

DrawOperation op_from_json(const nlohmann::json& j) {
    try {
        DrawOperation op;
        const auto kind = j.at("kind").get<std::string>();
        op.image_index = j.at("k").get<int>();
        op.label = j.at("l").get<std::string>();
        const auto& p = j.at("p");
        if (kind == "box") {
            if (!p.is_array() || p.size() != 4) throw Error(ErrorCode::Parse, "box p needs 4 numbers");
            op.geometry = canvas::BBoxGeometry{p[0].get<double>(), p[1].get<double>(),
                                               p[2].get<double>(), p[3].get<double>()};
        } else if (kind == "line") {
            canvas::PolylineGeometry line;
            for (const auto& pt : p) {
                if (!pt.is_array() || pt.size() != 2) {
                    throw Error(ErrorCode::Parse, "line points must be [x, y] pairs");
                }
                line.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
            }
            op.geometry = std::move(line);
        } else {
            throw Error(ErrorCode::Parse, fmt::format("unknown operation kind '{}'", kind));
        }
        return op;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, fmt::format("malformed operation record: {}", e.what()));
    }
}

}  // namespace drawspace::dsl
