#include <cstdlib>

#include "csv.hpp"
#include "flowtrace/errors.hpp"
#include "flowtrace/filter.hpp"

namespace flowtrace {

namespace {

constexpr const char* kMovesHeader =
    "move,global_seq,event_id,timestamp,session_id,action_type,raw_source_label,node_id,"
    "node_kind,connected_from,origin,payload";
constexpr std::size_t kMovesFieldCount = 12;

[[noreturn]] void fail(std::size_t line, const std::string& reason) {
    throw ParseError(ParseError::Kind::malformed_record,
                     "moves file line " + std::to_string(line) + ": " + reason);
}

}  // namespace

std::string moves_to_csv(const std::vector<DesignMove>& moves) {
    std::string out = kMovesHeader;
    out += '\n';
    for (const auto& move : moves) {
        const RawEvent& ev = move.event;
        std::string parents;
        for (std::size_t i = 0; i < ev.connected_from.size(); ++i) {
            if (i) parents += ';';
            parents += ev.connected_from[i];
        }
        out += to_string(move.move);
        out += ',';
        out += std::to_string(move.global_seq);
        out += ',';
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

std::vector<DesignMove> moves_from_csv(const std::string& text) {
    std::vector<DesignMove> moves;
    std::size_t pos = 0;
    std::size_t line = 1;
    std::vector<std::string> fields;
    std::string reason;

    if (!csvdetail::read_record(text, pos, line, fields, &reason)) return moves;
    std::string header;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) header += ',';
        header += fields[i];
    }
    if (header != kMovesHeader) fail(1, "unexpected header");

    while (true) {
        const std::size_t record_line = line;
        if (!csvdetail::read_record(text, pos, line, fields, &reason)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (!reason.empty()) fail(record_line, reason);
        if (fields.size() != kMovesFieldCount)
            fail(record_line, "expected " + std::to_string(kMovesFieldCount) + " fields, got " +
                                  std::to_string(fields.size()));
        DesignMove move;
        try {
            move.move = move_kind_from_string(fields[0]);
        } catch (const RulesError&) {
            fail(record_line, "unknown move kind \"" + fields[0] + "\"");
        }
        move.global_seq = static_cast<std::uint32_t>(std::strtoul(fields[1].c_str(), nullptr, 10));
        if (move.global_seq != moves.size() + 1)
            fail(record_line, "global_seq is not contiguous");
        RawEvent& ev = move.event;
        ev.event_id = fields[2];
        ev.timestamp = parse_timestamp(fields[3]);
        ev.session_id = fields[4];
        ev.action_type = fields[5];
        ev.raw_source_label = fields[6];
        ev.node_id = fields[7];
        ev.node_kind = fields[8].empty() ? "other" : fields[8];
        if (!fields[9].empty()) {
            std::size_t start = 0;
            while (true) {
                const std::size_t sep = fields[9].find(';', start);
                ev.connected_from.push_back(fields[9].substr(start, sep - start));
                if (sep == std::string::npos) break;
                start = sep + 1;
            }
        }
        ev.origin = fields[10].empty() ? "user" : fields[10];
        ev.payload = fields[11];
        moves.push_back(std::move(move));
    }
    return moves;
}

}  // namespace flowtrace
