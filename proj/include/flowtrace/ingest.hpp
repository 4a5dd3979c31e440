#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>

#include "flowtrace/event.hpp"

namespace flowtrace {

enum class ParseMode {
    strict,   // malformed rows raise ParseError
    lenient,  // malformed rows are skipped and counted
};

struct ParseReport {
    std::size_t rows_total = 0;  // data rows seen (header line excluded)
    std::size_t rows_parsed = 0;
    std::size_t rows_skipped = 0;
    std::map<std::string, std::size_t> skipped_by_reason;
};

struct ParseResult {
    SessionLog log;
    ParseReport report;
};

// Parses a raw session log. format is "csv" (canonical header required) or
// "jsonl" (one object per line). Missing optional fields default to an empty
// parent list, origin "user" and node_kind "other".
ParseResult parse_events(std::istream& input, const std::string& format,
                         ParseMode mode = ParseMode::strict);
ParseResult parse_events(const std::string& text, const std::string& format,
                         ParseMode mode = ParseMode::strict);

struct NormalizeResult {
    SessionLog log;
    std::size_t duplicates_removed = 0;
};

// Stable-sorts by (timestamp, event_id), drops byte-identical duplicates and
// rejects conflicting reuse of an event_id. Idempotent.
NormalizeResult normalize(SessionLog log);

// Canonical serializations; both round-trip through parse_events exactly.
std::string to_canonical_csv(const SessionLog& log);
std::string to_canonical_jsonl(const SessionLog& log);

}  // namespace flowtrace
