#pragma once

#include <stdexcept>
#include <string>

namespace flowtrace {

// Exit-code families used by the CLI. Library code throws one of the typed
// errors below; the CLI maps the family to a process exit code.
enum class ErrorFamily : int {
    usage = 1,
    parse = 2,
    graph = 3,
    rules = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorFamily family, std::string message)
        : std::runtime_error(std::move(message)), family_(family) {}

    ErrorFamily family() const noexcept { return family_; }

private:
    ErrorFamily family_;
};

// Malformed input logs (CSV/JSON-lines ingestion).
class ParseError : public Error {
public:
    enum class Kind {
        malformed_record,
        missing_required_field,
        conflicting_event_id,
    };

    ParseError(Kind kind, std::string message)
        : Error(ErrorFamily::parse, std::move(message)), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Bad rule files.
class RulesError : public Error {
public:
    enum class Kind {
        syntax,
        unknown_move_kind,
    };

    RulesError(Kind kind, std::string message)
        : Error(ErrorFamily::rules, std::move(message)), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Lineage construction failures.
class GraphError : public Error {
public:
    enum class Kind {
        cycle_detected,
        dangling_parent,
        duplicate_node,
        modify_unknown_node,
        modify_after_remove,
        duplicate_remove,
        missing_node_id,
    };

    GraphError(Kind kind, std::string message)
        : Error(ErrorFamily::graph, std::move(message)), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Parameter and consistency violations outside the lineage builder
// (bad n-gram order, empty phase window, unknown Markov state, mismatched
// session ids, invalid scenario specs). Shares the graph/validation exit code.
class ValidationError : public Error {
public:
    explicit ValidationError(std::string message)
        : Error(ErrorFamily::graph, std::move(message)) {}
};

class UsageError : public Error {
public:
    explicit UsageError(std::string message)
        : Error(ErrorFamily::usage, std::move(message)) {}
};

}  // namespace flowtrace
