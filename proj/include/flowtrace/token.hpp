#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "flowtrace/filter.hpp"

namespace flowtrace {

// Canonical rendering is `<MOVE>_<asset_kind>`: move uppercase, kind
// lowercase, e.g. "GENERATION_image". Move names contain no underscore, so
// the first '_' always terminates the move name.
struct BehavioralToken {
    MoveKind move = MoveKind::insert;
    std::string asset_kind;  // lowercase, non-empty; open set
    std::string text;

    bool operator==(const BehavioralToken&) const = default;
};

struct TokenSequence {
    std::string session_id;
    std::vector<BehavioralToken> tokens;  // aligned 1:1 with the move stream

    std::vector<std::string> texts() const;
};

BehavioralToken make_token(MoveKind move, std::string asset_kind);

// Inverse of make_token over canonical texts; case-insensitive on input.
BehavioralToken parse_token(const std::string& text);

// Token i derives from move i: move kind + node_kind (lowercased, "other"
// when absent). A function of (MoveKind, node_kind) only.
TokenSequence tokenize(const std::vector<DesignMove>& moves);

// Lexicographically sorted distinct token texts with counts.
std::vector<std::pair<std::string, std::size_t>> vocabulary(const TokenSequence& seq);

}  // namespace flowtrace
