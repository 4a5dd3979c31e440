#include "flowtrace/rules.hpp"

#include <cctype>
#include <sstream>

#include "flowtrace/errors.hpp"

namespace flowtrace {

std::string to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::insert: return "INSERT";
        case MoveKind::modify: return "MODIFY";
        case MoveKind::generation: return "GENERATION";
        case MoveKind::remove: return "REMOVE";
    }
    return "INSERT";
}

MoveKind move_kind_from_string(std::string_view name) {
    std::string upper(name);
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper == "INSERT") return MoveKind::insert;
    if (upper == "MODIFY") return MoveKind::modify;
    if (upper == "GENERATION") return MoveKind::generation;
    if (upper == "REMOVE") return MoveKind::remove;
    throw RulesError(RulesError::Kind::unknown_move_kind,
                     "unknown move kind \"" + std::string(name) + "\"");
}

bool glob_match(std::string_view pattern, std::string_view text) {
    // Iterative matcher with single-star backtracking; case-insensitive.
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    auto lower = [](char c) { return std::tolower(static_cast<unsigned char>(c)); };
    while (t < text.size()) {
        if (p < pattern.size() &&
            (pattern[p] == '?' || lower(pattern[p]) == lower(text[t]))) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

namespace {

bool rule_matches(const FilterRule& rule, const RawEvent& event) {
    if (!rule.action_glob.empty() && !glob_match(rule.action_glob, event.action_type))
        return false;
    if (!rule.source_glob.empty() && !glob_match(rule.source_glob, event.raw_source_label))
        return false;
    if (!rule.kind_glob.empty() && !glob_match(rule.kind_glob, event.node_kind)) return false;
    if (!rule.origin_match.empty() && rule.origin_match != event.origin) return false;
    return true;
}

std::string normalize_column(const std::string& column) {
    return column == "-" ? std::string() : column;
}

// Built-in rules. Matched top to bottom, first hit wins; '-' leaves a column
// unconstrained. Columns: verdict action_glob source_glob kind_glob origin
// move_or_reason.
constexpr const char* kDefaultRulesText = R"(# flowtrace default filter rules
#
# verdict  action_glob     source_glob      kind  origin  move_or_reason

# temporary object lifecycle and cache housekeeping
discard    *purge*         -                -     -       cleanup
discard    *gc_sweep*      -                -     -       cleanup
discard    -               *cache*          -     -       cleanup
discard    -               *temp*           -     -       cleanup
discard    -               *janitor*        -     -       cleanup

# backend connection bookkeeping and graph re-routing echoes
discard    *reroute*       -                -     -       rerouting
discard    *rewire*        -                -     -       rerouting
discard    *link_refresh*  -                -     -       rerouting
discard    -               *router*         -     -       rerouting
discard    -               *topology*       -     -       rerouting

# asynchronous generation chatter
discard    *progress*      -                -     -       async_progress
discard    *heartbeat*     -                -     -       async_progress
discard    -               *progress*       -     -       async_progress
discard    -               *intermediate*   -     -       async_progress
discard    -               *sync*           -     -       async_progress

# deletions not initiated by the user are housekeeping, not design moves
discard    *delete*        -                -     system  cleanup
discard    *remove*        -                -     system  cleanup

# creative design moves
keep       *import*        -                -     -       INSERT
keep       *create*        -                -     -       INSERT
keep       *insert*        -                -     -       INSERT
keep       *edit*          -                -     -       MODIFY
keep       *param*         -                -     -       MODIFY
keep       *metadata*      -                -     -       MODIFY
keep       *modif*         -                -     -       MODIFY
keep       *generat*       -                -     -       GENERATION
keep       *execute*       -                -     -       GENERATION
keep       *delete*        -                -     user    REMOVE
keep       *remove*        -                -     user    REMOVE
)";

}  // namespace

RuleSet load_rules(const std::string& text) {
    RuleSet set;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream columns(line);
        std::string verdict_name;
        if (!(columns >> verdict_name)) continue;  // blank or comment-only line

        std::string action, source, kind, origin, last;
        if (!(columns >> action >> source >> kind >> origin >> last))
            throw RulesError(RulesError::Kind::syntax,
                             "line " + std::to_string(line_no) +
                                 ": expected 6 columns (verdict action_glob source_glob "
                                 "kind_glob origin move_or_reason)");
        std::string extra;
        if (columns >> extra)
            throw RulesError(RulesError::Kind::syntax,
                             "line " + std::to_string(line_no) + ": unexpected trailing column \"" +
                                 extra + "\"");

        FilterRule rule;
        rule.action_glob = normalize_column(action);
        rule.source_glob = normalize_column(source);
        rule.kind_glob = normalize_column(kind);
        rule.origin_match = normalize_column(origin);
        if (!rule.origin_match.empty() && rule.origin_match != "user" &&
            rule.origin_match != "system" && rule.origin_match != "generated")
            throw RulesError(RulesError::Kind::syntax,
                             "line " + std::to_string(line_no) + ": origin must be one of "
                                 "user/system/generated or '-'");

        std::string verdict_lower = verdict_name;
        for (char& c : verdict_lower)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (verdict_lower == "keep") {
            rule.verdict.keep = true;
            rule.verdict.move = move_kind_from_string(last);
        } else if (verdict_lower == "discard") {
            rule.verdict.keep = false;
            rule.verdict.reason = last;
        } else {
            throw RulesError(RulesError::Kind::syntax,
                             "line " + std::to_string(line_no) + ": unknown verdict \"" +
                                 verdict_name + "\" (expected keep or discard)");
        }
        set.rules.push_back(std::move(rule));
    }
    if (set.rules.empty())
        throw RulesError(RulesError::Kind::syntax, "rule set is empty");
    return set;
}

const std::string& default_rules_text() {
    static const std::string text = kDefaultRulesText;
    return text;
}

const RuleSet& default_rules() {
    static const RuleSet set = load_rules(default_rules_text());
    return set;
}

Verdict classify(const RawEvent& event, const RuleSet& rules) {
    for (const auto& rule : rules.rules) {
        if (rule_matches(rule, event)) return rule.verdict;
    }
    return rules.default_verdict;
}

}  // namespace flowtrace
