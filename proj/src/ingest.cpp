#include "flowtrace/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "csv.hpp"
#include "flowtrace/errors.hpp"

namespace flowtrace {

namespace {

constexpr const char* kCsvHeader =
    "event_id,timestamp,session_id,action_type,raw_source_label,node_id,node_kind,"
    "connected_from,origin,payload";
constexpr std::size_t kFieldCount = 10;

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool valid_origin(const std::string& origin) {
    return origin == "user" || origin == "system" || origin == "generated";
}

// One malformed-row failure. In strict mode it becomes a ParseError; in
// lenient mode the row is skipped and the tag is counted.
struct RowError {
    ParseError::Kind kind;
    std::string tag;      // stable reason tag for the parse report
    std::string detail;
};

std::vector<std::string> split_parents(const std::string& joined) {
    std::vector<std::string> parts;
    if (joined.empty()) return parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t sep = joined.find(';', start);
        parts.push_back(joined.substr(start, sep - start));
        if (sep == std::string::npos) break;
        start = sep + 1;
    }
    return parts;
}

// Shared field validation; fills defaults and normalizes casing.
std::optional<RowError> finish_event(RawEvent& ev, const std::string& timestamp_text) {
    if (ev.event_id.empty() || timestamp_text.empty() || ev.action_type.empty())
        return RowError{ParseError::Kind::missing_required_field, "missing_required_field",
                        "event_id, timestamp and action_type are required"};
    try {
        ev.timestamp = parse_timestamp(timestamp_text);
    } catch (const ParseError&) {
        return RowError{ParseError::Kind::malformed_record, "bad_timestamp",
                        "unparseable timestamp \"" + timestamp_text + "\""};
    }
    if (ev.node_kind.empty())
        ev.node_kind = "other";
    else
        ev.node_kind = lowercase(ev.node_kind);
    if (ev.origin.empty()) ev.origin = "user";
    if (!valid_origin(ev.origin))
        return RowError{ParseError::Kind::malformed_record, "bad_origin",
                        "origin must be user, system or generated"};
    if (ev.node_id.find(';') != std::string::npos)
        return RowError{ParseError::Kind::malformed_record, "semicolon_in_node_id",
                        "node_id must not contain ';'"};
    for (const auto& parent : ev.connected_from) {
        if (parent.empty())
            return RowError{ParseError::Kind::malformed_record, "empty_parent_id",
                            "connected_from contains an empty id"};
        if (parent == ev.node_id)
            return RowError{ParseError::Kind::malformed_record, "self_parent",
                            "connected_from contains the event's own node_id"};
    }
    return std::nullopt;
}

bool read_csv_record(const std::string& text, std::size_t& pos, std::size_t& line,
                     std::vector<std::string>& fields, std::optional<RowError>& error) {
    error.reset();
    std::string reason;
    if (!csvdetail::read_record(text, pos, line, fields, &reason)) return false;
    if (!reason.empty())
        error = RowError{ParseError::Kind::malformed_record, reason,
                         reason == "unterminated_quote" ? "unterminated quoted field"
                                                        : "content after closing quote"};
    return true;
}

void report_row(ParseResult& result, ParseMode mode, const RowError& err, std::size_t line) {
    if (mode == ParseMode::strict)
        throw ParseError(err.kind, "line " + std::to_string(line) + ": " + err.detail);
    ++result.report.rows_skipped;
    ++result.report.skipped_by_reason[err.tag];
}

// Appends the event if its session matches the log's (first event wins).
void accept_event(ParseResult& result, ParseMode mode, RawEvent ev, std::size_t line) {
    if (result.log.events.empty()) {
        result.log.session_id = ev.session_id;
    } else if (ev.session_id != result.log.session_id) {
        report_row(result, mode,
                   RowError{ParseError::Kind::malformed_record, "session_mismatch",
                            "event session_id \"" + ev.session_id +
                                "\" does not match \"" + result.log.session_id + "\""},
                   line);
        return;
    }
    ++result.report.rows_parsed;
    result.log.events.push_back(std::move(ev));
}

ParseResult parse_csv(const std::string& text, ParseMode mode) {
    ParseResult result;
    result.log.source_format = "csv";

    std::size_t pos = 0;
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) pos = 3;
    if (pos >= text.size()) return result;  // empty input: empty log

    std::size_t line = 1;
    std::vector<std::string> fields;
    std::optional<RowError> row_error;

    if (!read_csv_record(text, pos, line, fields, row_error)) return result;
    std::string header;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) header += ',';
        header += fields[i];
    }
    if (header != kCsvHeader)
        throw ParseError(ParseError::Kind::malformed_record,
                         "line 1: expected canonical CSV header \"" + std::string(kCsvHeader) +
                             "\", got \"" + header + "\"");

    while (true) {
        const std::size_t record_line = line;
        if (!read_csv_record(text, pos, line, fields, row_error)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        ++result.report.rows_total;
        if (row_error) {
            report_row(result, mode, *row_error, record_line);
            continue;
        }
        if (fields.size() != kFieldCount) {
            report_row(result, mode,
                       RowError{ParseError::Kind::malformed_record, "bad_field_count",
                                "expected " + std::to_string(kFieldCount) + " fields, got " +
                                    std::to_string(fields.size())},
                       record_line);
            continue;
        }
        RawEvent ev;
        ev.event_id = fields[0];
        ev.session_id = fields[2];
        ev.action_type = fields[3];
        ev.raw_source_label = fields[4];
        ev.node_id = fields[5];
        ev.node_kind = fields[6];
        ev.connected_from = split_parents(fields[7]);
        ev.origin = fields[8];
        ev.payload = fields[9];
        if (auto err = finish_event(ev, fields[1])) {
            report_row(result, mode, *err, record_line);
            continue;
        }
        accept_event(result, mode, std::move(ev), record_line);
    }
    return result;
}

ParseResult parse_jsonl(const std::string& text, ParseMode mode) {
    ParseResult result;
    result.log.source_format = "jsonl";

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        ++result.report.rows_total;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            report_row(result, mode,
                       RowError{ParseError::Kind::malformed_record, "bad_json",
                                "line is not a JSON object"},
                       line_no);
            continue;
        }

        RawEvent ev;
        std::string timestamp_text;
        bool types_ok = true;
        auto get_string = [&](const char* key, std::string& out) {
            auto it = obj.find(key);
            if (it == obj.end() || it->is_null()) return;
            if (!it->is_string()) {
                types_ok = false;
                return;
            }
            out = it->get<std::string>();
        };
        get_string("event_id", ev.event_id);
        get_string("timestamp", timestamp_text);
        get_string("session_id", ev.session_id);
        get_string("action_type", ev.action_type);
        get_string("raw_source_label", ev.raw_source_label);
        get_string("node_id", ev.node_id);
        ev.node_kind.clear();
        get_string("node_kind", ev.node_kind);
        ev.origin.clear();
        get_string("origin", ev.origin);
        get_string("payload", ev.payload);
        if (auto it = obj.find("connected_from"); it != obj.end() && !it->is_null()) {
            if (!it->is_array()) {
                types_ok = false;
            } else {
                for (const auto& entry : *it) {
                    if (!entry.is_string()) {
                        types_ok = false;
                        break;
                    }
                    ev.connected_from.push_back(entry.get<std::string>());
                }
            }
        }
        if (!types_ok) {
            report_row(result, mode,
                       RowError{ParseError::Kind::malformed_record, "bad_field_type",
                                "field has wrong JSON type"},
                       line_no);
            continue;
        }
        if (auto err = finish_event(ev, timestamp_text)) {
            report_row(result, mode, *err, line_no);
            continue;
        }
        accept_event(result, mode, std::move(ev), line_no);
    }
    return result;
}

}  // namespace

ParseResult parse_events(const std::string& text, const std::string& format, ParseMode mode) {
    if (format == "csv") return parse_csv(text, mode);
    if (format == "jsonl") return parse_jsonl(text, mode);
    throw UsageError("unknown input format \"" + format + "\" (expected csv or jsonl)");
}

ParseResult parse_events(std::istream& input, const std::string& format, ParseMode mode) {
    std::ostringstream buffer;
    buffer << input.rdbuf();
    return parse_events(buffer.str(), format, mode);
}

NormalizeResult normalize(SessionLog log) {
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const RawEvent& a, const RawEvent& b) {
                         if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                         return a.event_id < b.event_id;
                     });

    NormalizeResult result;
    std::unordered_map<std::string, std::size_t> first_index;
    std::vector<RawEvent> unique;
    unique.reserve(log.events.size());
    for (auto& ev : log.events) {
        auto [it, inserted] = first_index.try_emplace(ev.event_id, unique.size());
        if (inserted) {
            unique.push_back(std::move(ev));
            continue;
        }
        if (unique[it->second] == ev) {
            ++result.duplicates_removed;
            continue;
        }
        throw ParseError(ParseError::Kind::conflicting_event_id,
                         "event_id \"" + ev.event_id + "\" reused with differing fields");
    }
    log.events = std::move(unique);
    result.log = std::move(log);
    return result;
}

std::string to_canonical_csv(const SessionLog& log) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& ev : log.events) {
        std::string parents;
        for (std::size_t i = 0; i < ev.connected_from.size(); ++i) {
            if (i) parents += ';';
            parents += ev.connected_from[i];
        }
        out += csvdetail::quote(ev.event_id);
        out += ',';
        out += format_timestamp(ev.timestamp);
        out += ',';
        out += csvdetail::quote(ev.session_id);
        out += ',';
        out += csvdetail::quote(ev.action_type);
        out += ',';
        out += csvdetail::quote(ev.raw_source_label);
        out += ',';
        out += csvdetail::quote(ev.node_id);
        out += ',';
        out += csvdetail::quote(ev.node_kind);
        out += ',';
        out += csvdetail::quote(parents);
        out += ',';
        out += csvdetail::quote(ev.origin);
        out += ',';
        out += csvdetail::quote(ev.payload);
        out += '\n';
    }
    return out;
}

std::string to_canonical_jsonl(const SessionLog& log) {
    std::string out;
    for (const auto& ev : log.events) {
        nlohmann::ordered_json obj;
        obj["event_id"] = ev.event_id;
        obj["timestamp"] = format_timestamp(ev.timestamp);
        obj["session_id"] = ev.session_id;
        obj["action_type"] = ev.action_type;
        obj["raw_source_label"] = ev.raw_source_label;
        obj["node_id"] = ev.node_id;
        obj["node_kind"] = ev.node_kind;
        obj["connected_from"] = ev.connected_from;
        obj["origin"] = ev.origin;
        obj["payload"] = ev.payload;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

}  // namespace flowtrace
