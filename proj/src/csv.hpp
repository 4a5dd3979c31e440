#pragma once

// Private RFC-4180 helpers shared by the event and move serializers.

#include <cstddef>
#include <string>
#include <vector>

namespace flowtrace::csvdetail {

// Reads one record starting at pos; returns false at end of input. `line`
// reports the line the record started on and advances across embedded
// newlines in quoted fields. On structural problems *error is set to a short
// reason tag ("unterminated_quote", "garbage_after_quote") and the record is
// still consumed.
inline bool read_record(const std::string& text, std::size_t& pos, std::size_t& line,
                        std::vector<std::string>& fields, std::string* error) {
    fields.clear();
    if (error) error->clear();
    if (pos >= text.size()) return false;

    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    while (true) {
        if (pos == text.size()) {
            if (in_quotes && error && error->empty()) *error = "unterminated_quote";
            fields.push_back(std::move(field));
            return true;
        }
        const char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
                ++pos;
            }
            continue;
        }
        if (c == '"' && field.empty() && !quoted_field) {
            in_quotes = true;
            quoted_field = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            quoted_field = false;
            ++pos;
        } else if (c == '\n' || c == '\r') {
            fields.push_back(std::move(field));
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            ++line;
            return true;
        } else {
            if (quoted_field && error && error->empty()) *error = "garbage_after_quote";
            field += c;
            ++pos;
        }
    }
}

inline std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace flowtrace::csvdetail
