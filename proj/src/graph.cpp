#include "flowtrace/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "flowtrace/errors.hpp"

namespace flowtrace {

namespace {

[[noreturn]] void fail(GraphError::Kind kind, const std::string& message) {
    throw GraphError(kind, message);
}

// Walks parent links to present one concrete cycle in the error message.
std::string find_cycle_path(const WorkflowGraph& graph,
                            const std::set<std::string>& suspects) {
    std::unordered_map<std::string, std::vector<std::string>> parents;
    for (const auto& edge : graph.edges)
        if (suspects.count(edge.parent_id) && suspects.count(edge.child_id))
            parents[edge.child_id].push_back(edge.parent_id);

    const std::string start = *suspects.begin();
    std::vector<std::string> path{start};
    std::unordered_set<std::string> seen{start};
    std::string current = start;
    while (true) {
        const auto it = parents.find(current);
        if (it == parents.end() || it->second.empty()) break;  // defensive
        current = it->second.front();
        if (seen.count(current)) {
            // Trim the tail leading into the cycle.
            const auto entry = std::find(path.begin(), path.end(), current);
            std::string text;
            for (auto p = entry; p != path.end(); ++p) text += *p + " -> ";
            text += current;
            return text;
        }
        seen.insert(current);
        path.push_back(current);
    }
    return start;
}

}  // namespace

BuildResult build_graph(const std::vector<DesignMove>& moves, BuildMode mode) {
    BuildResult result;
    WorkflowGraph& graph = result.graph;
    if (!moves.empty()) graph.session_id = moves.front().event.session_id;

    const bool lenient = mode == BuildMode::lenient;
    auto warn = [&](std::string message) { result.warnings.push_back(std::move(message)); };

    std::set<LineageEdge> edge_set;
    std::uint32_t modify_counter = 0;
    std::uint32_t remove_counter = 0;

    auto placeholder = [&](const std::string& node_id, TimestampMs at) -> AssetNode& {
        AssetNode node;
        node.node_id = node_id;
        node.kind = "other";
        node.origin = "manual";
        node.created_global_seq = 0;  // synthesized, no creating move
        node.created_at = at;
        return graph.nodes.emplace(node_id, std::move(node)).first->second;
    };

    for (const auto& move : moves) {
        const RawEvent& ev = move.event;
        switch (move.move) {
            case MoveKind::insert:
            case MoveKind::generation: {
                if (ev.node_id.empty())
                    fail(GraphError::Kind::missing_node_id,
                         "creation move (event \"" + ev.event_id + "\") carries no node_id");
                auto existing = graph.nodes.find(ev.node_id);
                if (existing != graph.nodes.end() && existing->second.created_global_seq != 0) {
                    if (!lenient)
                        fail(GraphError::Kind::duplicate_node,
                             "node \"" + ev.node_id + "\" created twice (event \"" +
                                 ev.event_id + "\")");
                    warn("ignored re-creation of node \"" + ev.node_id + "\" (event \"" +
                         ev.event_id + "\")");
                    break;
                }
                AssetNode& node = existing != graph.nodes.end()
                                      ? existing->second
                                      : graph.nodes.emplace(ev.node_id, AssetNode{})
                                            .first->second;
                // May upgrade a placeholder synthesized for a dangling parent.
                node.node_id = ev.node_id;
                node.kind = ev.node_kind.empty() ? "other" : ev.node_kind;
                node.origin = move.move == MoveKind::generation ? "generated" : "manual";
                node.created_global_seq = move.global_seq;
                node.created_at = ev.timestamp;

                for (const auto& parent_id : ev.connected_from) {
                    if (!graph.nodes.count(parent_id)) {
                        if (!lenient)
                            fail(GraphError::Kind::dangling_parent,
                                 "parent \"" + parent_id + "\" of node \"" + ev.node_id +
                                     "\" was never created");
                        warn("synthesized placeholder for dangling parent \"" + parent_id +
                             "\" of node \"" + ev.node_id + "\"");
                        placeholder(parent_id, ev.timestamp);
                    }
                    LineageEdge edge{parent_id, ev.node_id};
                    if (edge_set.insert(edge).second) graph.edges.push_back(edge);
                }
                break;
            }
            case MoveKind::modify: {
                auto it = graph.nodes.find(ev.node_id);
                if (ev.node_id.empty() || it == graph.nodes.end()) {
                    if (!lenient)
                        fail(GraphError::Kind::modify_unknown_node,
                             "MODIFY targets unknown node \"" + ev.node_id + "\" (event \"" +
                                 ev.event_id + "\")");
                    warn("synthesized placeholder for modified unknown node \"" + ev.node_id +
                         "\"");
                    it = graph.nodes.find(placeholder(ev.node_id, ev.timestamp).node_id);
                }
                if (it->second.remove_seq.has_value()) {
                    if (!lenient)
                        fail(GraphError::Kind::modify_after_remove,
                             "MODIFY of node \"" + ev.node_id + "\" after its REMOVE");
                    warn("MODIFY of node \"" + ev.node_id + "\" after its REMOVE");
                }
                it->second.modify_seqs.push_back(++modify_counter);
                break;
            }
            case MoveKind::remove: {
                auto it = graph.nodes.find(ev.node_id);
                if (ev.node_id.empty() || it == graph.nodes.end()) {
                    if (!lenient)
                        fail(GraphError::Kind::modify_unknown_node,
                             "REMOVE targets unknown node \"" + ev.node_id + "\" (event \"" +
                                 ev.event_id + "\")");
                    warn("synthesized placeholder for removed unknown node \"" + ev.node_id +
                         "\"");
                    it = graph.nodes.find(placeholder(ev.node_id, ev.timestamp).node_id);
                }
                ++remove_counter;
                if (it->second.remove_seq.has_value()) {
                    if (!lenient)
                        fail(GraphError::Kind::duplicate_remove,
                             "node \"" + ev.node_id + "\" removed twice");
                    warn("ignored second REMOVE of node \"" + ev.node_id + "\"");
                    break;
                }
                it->second.remove_seq = remove_counter;
                break;
            }
        }
    }

    // Depths via Kahn's algorithm; also the cycle check. Cycles can only
    // arise from forward references resolved leniently, but the invariant is
    // hard in both modes.
    std::unordered_map<std::string, std::size_t> indegree;
    std::unordered_map<std::string, std::vector<std::string>> children;
    for (const auto& [id, node] : graph.nodes) indegree[id] = 0;
    for (const auto& edge : graph.edges) {
        ++indegree[edge.child_id];
        children[edge.parent_id].push_back(edge.child_id);
    }
    std::deque<std::string> ready;
    for (const auto& [id, node] : graph.nodes)
        if (indegree[id] == 0) ready.push_back(id);

    std::size_t visited = 0;
    std::unordered_map<std::string, std::uint32_t> depth;
    while (!ready.empty()) {
        const std::string id = ready.front();
        ready.pop_front();
        ++visited;
        const std::uint32_t d = depth[id];  // 0 for roots
        graph.nodes.at(id).depth = d;
        graph.max_depth = std::max(graph.max_depth, d);
        for (const auto& child : children[id]) {
            depth[child] = std::max(depth[child], d + 1);
            if (--indegree[child] == 0) ready.push_back(child);
        }
    }
    if (visited != graph.nodes.size()) {
        std::set<std::string> suspects;
        for (const auto& [id, deg] : indegree)
            if (deg > 0) suspects.insert(id);
        fail(GraphError::Kind::cycle_detected,
             "connected_from references form a cycle: " + find_cycle_path(graph, suspects));
    }
    return result;
}

GraphStats graph_stats(const WorkflowGraph& graph) {
    GraphStats stats;
    stats.node_count = graph.nodes.size();
    stats.edge_count = graph.edges.size();
    stats.max_depth = graph.max_depth;

    std::unordered_map<std::string, std::size_t> outdegree;
    for (const auto& edge : graph.edges) ++outdegree[edge.parent_id];
    std::map<std::uint32_t, std::size_t> per_depth;
    for (const auto& [id, node] : graph.nodes) {
        const auto out = outdegree.find(id);
        const std::size_t degree = out == outdegree.end() ? 0 : out->second;
        if (degree >= 2) ++stats.branch_count;
        if (degree == 0) ++stats.leaf_count;
        ++per_depth[node.depth];
    }
    std::size_t widest = 0;
    for (const auto& [d, count] : per_depth) {
        if (count > widest) {  // lowest depth wins ties
            widest = count;
            stats.widest_depth = d;
        }
    }
    return stats;
}

}  // namespace flowtrace
