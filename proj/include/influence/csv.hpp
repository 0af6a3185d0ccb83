#pragma once

// Minimal RFC 4180 style CSV reading plus locale-independent number
// formatting shared by every file the pipeline reads or writes.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace influence::csv {

struct Row {
    std::size_t line = 0;  // 1-based line number where the row starts
    std::vector<std::string> fields;
};

/// Reads rows one at a time. Handles quoted fields (with "" escapes and
/// embedded newlines), CRLF line endings and a missing final newline.
/// Blank lines are skipped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Returns false at end of input. Throws std::runtime_error on an
    /// unterminated quoted field.
    bool next(Row& row) {
        row.fields.clear();
        std::string line;
        while (true) {
            if (!std::getline(in_, line)) return false;
            ++line_;
            strip_cr(line);
            if (!line.empty()) break;
        }
        row.line = line_;

        std::string field;
        bool quoted = false;
        bool field_started_quoted = false;
        std::size_t i = 0;
        while (true) {
            if (i == line.size()) {
                if (!quoted) break;
                // Quoted field continues on the next physical line.
                std::string more;
                if (!std::getline(in_, more))
                    throw std::runtime_error("line " + std::to_string(row.line) +
                                             ": unterminated quoted field");
                ++line_;
                strip_cr(more);
                field.push_back('\n');
                line = std::move(more);
                i = 0;
                continue;
            }
            const char c = line[i++];
            if (quoted) {
                if (c == '"') {
                    if (i < line.size() && line[i] == '"') {
                        field.push_back('"');
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(c);
                }
            } else if (c == ',') {
                row.fields.push_back(std::move(field));
                field.clear();
                field_started_quoted = false;
            } else if (c == '"' && field.empty() && !field_started_quoted) {
                quoted = true;
                field_started_quoted = true;
            } else {
                field.push_back(c);
            }
        }
        row.fields.push_back(std::move(field));
        return true;
    }

private:
    static void strip_cr(std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    }

    std::istream& in_;
    std::size_t line_ = 0;
};

/// Quotes a field only when it needs it.
inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Shortest-general formatting with `digits` significant digits, independent
/// of the C locale. Negative zero prints as "0".
inline std::string format_real(double value, int digits = 9) {
    if (value == 0.0) value = 0.0;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

/// Round-trip exact formatting (17 significant digits).
inline std::string format_exact(double value) { return format_real(value, 17); }

inline std::optional<double> parse_real(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

inline std::optional<long long> parse_integer(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    long long value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace influence::csv
