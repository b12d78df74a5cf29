#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "conceptscope/common.hpp"

namespace conceptscope::csv {

/// Fixed float formatting used by every text artifact: 12 significant digits.
inline std::string format_real(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

inline std::string format_real(const MaybeReal& value) { return value ? format_real(*value) : std::string(); }

inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << quote(fields[i]);
    }
    out << "\r\n";
}

/// RFC-4180 reader. Accepts CRLF or bare LF line endings.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the next record; returns false at end of input.
    bool next(std::vector<std::string>& fields) {
        fields.clear();
        int c = in_.get();
        if (c == EOF) return false;
        ++line_;
        std::string field;
        bool quoted = false;
        bool at_field_start = true;
        for (;; c = in_.get()) {
            if (quoted) {
                if (c == EOF) throw DataError("csv: unterminated quoted field at line " + std::to_string(line_));
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(static_cast<char>(c));
                }
                continue;
            }
            if (c == EOF || c == '\n') break;
            if (c == '\r') {
                if (in_.peek() == '\n') in_.get();
                break;
            }
            if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                at_field_start = true;
                continue;
            }
            if (c == '"' && at_field_start) {
                quoted = true;
                at_field_start = false;
                continue;
            }
            at_field_start = false;
            field.push_back(static_cast<char>(c));
        }
        fields.push_back(std::move(field));
        return true;
    }

    /// Line number of the start of the last record read (1-based).
    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

inline std::optional<double> parse_real(std::string_view text) {
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError("not a number: '" + std::string(text) + "'");
    return value;
}

inline long long parse_int(std::string_view text) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw DataError("not an integer: '" + std::string(text) + "'");
    return value;
}

/// Splits one TSV line on tabs (no quoting).
inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

}  // namespace conceptscope::csv
