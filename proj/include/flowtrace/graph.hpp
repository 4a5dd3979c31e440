#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowtrace/filter.hpp"

namespace flowtrace {

struct AssetNode {
    std::string node_id;
    std::string kind;    // "prompt" | "image" | "video" | other
    std::string origin;  // "generated" (created by GENERATION) | "manual"
    std::uint32_t created_global_seq = 0;  // 0 for synthesized placeholders
    TimestampMs created_at = 0;
    std::uint32_t depth = 0;  // 0 iff no parents, else 1 + max(parent depths)
    std::vector<std::uint32_t> modify_seqs;   // session-wide MODIFY stream
    std::optional<std::uint32_t> remove_seq;  // session-wide REMOVE stream

    bool operator==(const AssetNode&) const = default;
};

struct LineageEdge {
    std::string parent_id;
    std::string child_id;

    auto operator<=>(const LineageEdge&) const = default;
};

struct WorkflowGraph {
    std::string session_id;
    std::map<std::string, AssetNode> nodes;
    std::vector<LineageEdge> edges;  // unique pairs, acyclic
    std::uint32_t max_depth = 0;
};

enum class BuildMode {
    strict,   // dangling parents, duplicate creations etc. raise GraphError
    lenient,  // synthesize placeholders / record warnings where recoverable
};

struct BuildResult {
    WorkflowGraph graph;
    std::vector<std::string> warnings;  // lenient-mode recoveries, in order
};

// Builds the provenance DAG from the kept move stream. INSERT/GENERATION
// create nodes and attach edges from connected_from; MODIFY/REMOVE annotate
// existing nodes with session-wide counter values. Cycles are an error in
// both modes.
BuildResult build_graph(const std::vector<DesignMove>& moves,
                        BuildMode mode = BuildMode::strict);

struct GraphStats {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::uint32_t max_depth = 0;
    std::size_t branch_count = 0;  // nodes with out-degree >= 2
    std::size_t leaf_count = 0;    // nodes with out-degree 0
    std::uint32_t widest_depth = 0;  // depth with most nodes, lowest wins ties

    bool operator==(const GraphStats&) const = default;
};

GraphStats graph_stats(const WorkflowGraph& graph);

}  // namespace flowtrace
