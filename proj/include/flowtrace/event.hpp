#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flowtrace {

// UTC milliseconds since the Unix epoch.
using TimestampMs = std::int64_t;

// Canonical 10-field event schema shared by every pipeline stage. The
// canonical CSV column order matches the field order here.
struct RawEvent {
    std::string event_id;    // unique within one session
    TimestampMs timestamp = 0;
    std::string session_id;
    std::string action_type;       // raw vendor action string
    std::string raw_source_label;  // raw vendor source/subsystem string
    std::string node_id;           // empty for pure system events
    std::string node_kind = "other";          // lowercase; open set
    std::vector<std::string> connected_from;  // parent node ids, given order
    std::string origin = "user";              // user | system | generated
    std::string payload;                      // opaque, preserved verbatim

    bool operator==(const RawEvent&) const = default;
};

struct SessionLog {
    std::string session_id;
    std::vector<RawEvent> events;
    std::string source_format;  // "csv" | "jsonl"
};

// Parses ISO-8601 with an explicit UTC offset ("Z" or +/-hh:mm) and up to
// millisecond precision. Throws ParseError on anything else.
TimestampMs parse_timestamp(const std::string& text);

// Renders UTC with exactly three fractional digits and a "Z" suffix.
std::string format_timestamp(TimestampMs ms);

}  // namespace flowtrace
