#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "flowtrace/digest.hpp"
#include "flowtrace/graph.hpp"
#include "flowtrace/mining.hpp"

namespace flowtrace {

struct Coord {
    std::uint32_t x = 0;  // generation depth
    std::uint32_t y = 0;  // chronological rank within the depth

    bool operator==(const Coord&) const = default;
};

struct LayoutedGraph {
    WorkflowGraph graph;
    std::map<std::string, Coord> coords;
};

// x = node depth; within each depth, y = 0..k-1 in ascending
// (created_at, created_global_seq) order.
LayoutedGraph layout(const WorkflowGraph& graph);

// Deterministic Graphviz digraph. box = generated, ellipse = manual;
// fill colors by kind (image lightblue, video lightgreen, prompt pink,
// other gray); labels carry the global sequence number plus M:/R: counter
// lines; positions pinned to the layout grid with y growing downward.
std::string to_dot(const LayoutedGraph& lg);

// Optional sections of the structured document; null pointers render as
// JSON null (empty lists stay empty lists).
struct ExportSections {
    const GraphStats* stats = nullptr;
    const NGramTable* ngrams = nullptr;
    const std::vector<NGramEntry>* top = nullptr;  // shown inside "ngrams"
    const TransitionModel* transitions = nullptr;
    const ContextDigest* digest = nullptr;
};

// Single structured JSON document with sections meta, nodes, edges, stats,
// ngrams, transitions, digest. Keys sorted; probabilities at full precision
// plus a one-decimal percent "display" field. Byte-stable across runs.
std::string to_json(const LayoutedGraph& lg, const ExportSections& sections = {});

}  // namespace flowtrace
