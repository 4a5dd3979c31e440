#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowtrace/event.hpp"

namespace flowtrace {

// The four creative design moves. Closed enumeration.
enum class MoveKind {
    insert,
    modify,
    generation,
    remove,
};

// Canonical uppercase names ("INSERT", ...).
std::string to_string(MoveKind kind);
// Case-insensitive; throws RulesError(unknown_move_kind) on anything else.
MoveKind move_kind_from_string(std::string_view name);

struct Verdict {
    bool keep = false;
    MoveKind move = MoveKind::insert;  // valid when keep
    std::string reason;                // valid when !keep
};

// One line of a rule file. Empty glob/origin strings mean "unconstrained"
// (written as "-" in rule files). Globs support only '*' and '?' and match
// case-insensitively against the whole value.
struct FilterRule {
    std::string action_glob;
    std::string source_glob;
    std::string kind_glob;
    std::string origin_match;  // exact value, or empty for any
    Verdict verdict;
};

struct RuleSet {
    std::vector<FilterRule> rules;  // first match wins
    Verdict default_verdict{false, MoveKind::insert, "unmatched"};
};

// Case-insensitive glob match, '*' and '?' only, anchored at both ends.
bool glob_match(std::string_view pattern, std::string_view text);

// Parses the rule-file grammar: one rule per line, columns
//   verdict action_glob source_glob kind_glob origin move_or_reason
// separated by whitespace, '-' for "any", '#' starts a comment.
RuleSet load_rules(const std::string& text);

// Built-in rule set covering the common noise families (cache/temp cleanup,
// connection re-routing, async generation chatter) and the four move families.
const RuleSet& default_rules();
const std::string& default_rules_text();

// Verdict of the first rule whose four predicates all match; the set's
// default verdict otherwise. Total function.
Verdict classify(const RawEvent& event, const RuleSet& rules);

}  // namespace flowtrace
