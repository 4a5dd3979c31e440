#include "flowtrace/token.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "flowtrace/errors.hpp"

namespace flowtrace {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::vector<std::string> TokenSequence::texts() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) out.push_back(token.text);
    return out;
}

BehavioralToken make_token(MoveKind move, std::string asset_kind) {
    BehavioralToken token;
    token.move = move;
    token.asset_kind = lowercase(std::move(asset_kind));
    if (token.asset_kind.empty()) token.asset_kind = "other";
    token.text = to_string(move) + "_" + token.asset_kind;
    return token;
}

BehavioralToken parse_token(const std::string& text) {
    const std::size_t sep = text.find('_');
    if (sep == std::string::npos || sep == 0 || sep + 1 >= text.size())
        throw ValidationError("token \"" + text + "\" is not of the form MOVE_assetkind");
    try {
        return make_token(move_kind_from_string(text.substr(0, sep)), text.substr(sep + 1));
    } catch (const RulesError&) {
        throw ValidationError("token \"" + text + "\" does not start with a move kind");
    }
}

TokenSequence tokenize(const std::vector<DesignMove>& moves) {
    TokenSequence seq;
    if (!moves.empty()) seq.session_id = moves.front().event.session_id;
    seq.tokens.reserve(moves.size());
    for (const auto& move : moves) seq.tokens.push_back(make_token(move.move, move.event.node_kind));
    return seq;
}

std::vector<std::pair<std::string, std::size_t>> vocabulary(const TokenSequence& seq) {
    std::map<std::string, std::size_t> counts;
    for (const auto& token : seq.tokens) ++counts[token.text];
    return {counts.begin(), counts.end()};
}

}  // namespace flowtrace
