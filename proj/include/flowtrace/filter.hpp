#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flowtrace/event.hpp"
#include "flowtrace/rules.hpp"

namespace flowtrace {

// Execution policy for the data-parallel kernels. Outputs are identical in
// every mode; "autodetect" switches to OpenMP above a size threshold.
enum class ExecMode {
    serial,
    parallel,
    autodetect,
};

struct DesignMove {
    MoveKind move = MoveKind::insert;
    RawEvent event;                  // source event, all fields preserved
    std::uint32_t global_seq = 0;    // 1-based over kept moves, chronological

    bool operator==(const DesignMove&) const = default;
};

struct FilterReport {
    std::size_t input_count = 0;
    std::size_t kept_count = 0;
    std::size_t discarded_count = 0;
    std::map<std::string, std::size_t> discarded_by_reason;
    std::map<MoveKind, std::size_t> kept_by_move;
    double reduction_fraction = 0.0;  // discarded / input, 0 when input empty
};

struct FilterResult {
    std::vector<DesignMove> moves;
    FilterReport report;
};

// Per-event verdicts, one per input event in order. The data-parallel kernel
// behind apply_rules; exposed so the serial reference and the OpenMP path can
// be compared directly.
std::vector<Verdict> classify_all(const std::vector<RawEvent>& events,
                                  const RuleSet& rules,
                                  ExecMode mode = ExecMode::autodetect);

// Filters a normalized log: kept moves retain chronological order and get
// contiguous 1..N global sequence numbers; report counts always reconcile.
FilterResult apply_rules(const SessionLog& log, const RuleSet& rules,
                         ExecMode mode = ExecMode::autodetect);

std::string filter_report_json(const FilterReport& report);

// Move-stream intermediate: the canonical event CSV prefixed with
// move,global_seq columns. moves_from_csv validates the header, the move
// names and global_seq contiguity (always strict; this is our own artifact).
std::string moves_to_csv(const std::vector<DesignMove>& moves);
std::vector<DesignMove> moves_from_csv(const std::string& text);

}  // namespace flowtrace
