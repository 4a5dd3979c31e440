#include "flowtrace/export.hpp"

#include <algorithm>

#include <json.hpp>

#include "flowtrace/version.hpp"

namespace flowtrace {

namespace {

std::string dot_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string fill_color(const std::string& kind) {
    if (kind == "image") return "lightblue";
    if (kind == "video") return "lightgreen";
    if (kind == "prompt") return "pink";
    return "gray";
}

std::string node_label(const AssetNode& node) {
    std::string label = "#" + std::to_string(node.created_global_seq);
    if (!node.modify_seqs.empty()) {
        label += "\\nM:";
        for (std::size_t i = 0; i < node.modify_seqs.size(); ++i) {
            if (i) label += ',';
            label += std::to_string(node.modify_seqs[i]);
        }
    }
    if (node.remove_seq) label += "\\nR:" + std::to_string(*node.remove_seq);
    return label;
}

// Nodes in (depth, y) order; the layout already fixes y within each depth.
std::vector<const AssetNode*> nodes_in_layout_order(const LayoutedGraph& lg) {
    std::vector<const AssetNode*> nodes;
    nodes.reserve(lg.graph.nodes.size());
    for (const auto& [id, node] : lg.graph.nodes) nodes.push_back(&node);
    std::sort(nodes.begin(), nodes.end(), [&](const AssetNode* a, const AssetNode* b) {
        const Coord& ca = lg.coords.at(a->node_id);
        const Coord& cb = lg.coords.at(b->node_id);
        if (ca.x != cb.x) return ca.x < cb.x;
        return ca.y < cb.y;
    });
    return nodes;
}

}  // namespace

LayoutedGraph layout(const WorkflowGraph& graph) {
    LayoutedGraph lg;
    lg.graph = graph;

    std::map<std::uint32_t, std::vector<const AssetNode*>> by_depth;
    for (const auto& [id, node] : lg.graph.nodes) by_depth[node.depth].push_back(&node);
    for (auto& [depth, nodes] : by_depth) {
        std::sort(nodes.begin(), nodes.end(), [](const AssetNode* a, const AssetNode* b) {
            if (a->created_at != b->created_at) return a->created_at < b->created_at;
            if (a->created_global_seq != b->created_global_seq)
                return a->created_global_seq < b->created_global_seq;
            return a->node_id < b->node_id;
        });
        for (std::size_t y = 0; y < nodes.size(); ++y)
            lg.coords[nodes[y]->node_id] = Coord{depth, static_cast<std::uint32_t>(y)};
    }
    return lg;
}

std::string to_dot(const LayoutedGraph& lg) {
    std::string out = "digraph workflow {\n";
    out += "  graph [rankdir=LR];\n";
    out += "  node [style=filled];\n";
    for (const AssetNode* node : nodes_in_layout_order(lg)) {
        const Coord& coord = lg.coords.at(node->node_id);
        out += "  \"" + dot_escape(node->node_id) + "\" [shape=";
        out += node->origin == "generated" ? "box" : "ellipse";
        out += ", fillcolor=" + fill_color(node->kind);
        // Label text is #digits plus M:/R: counter lines; nothing to escape.
        out += ", label=\"" + node_label(*node) + "\"";
        out += ", pos=\"" + std::to_string(coord.x) + "," + std::to_string(-static_cast<std::int64_t>(coord.y)) + "!\"";
        out += "];\n";
    }
    std::vector<LineageEdge> edges = lg.graph.edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& edge : edges) {
        out += "  \"" + dot_escape(edge.parent_id) + "\" -> \"" + dot_escape(edge.child_id) +
               "\";\n";
    }
    out += "}\n";
    return out;
}

namespace {

nlohmann::json ngram_entry_json(const Gram& gram, std::uint64_t count, double share) {
    nlohmann::json entry;
    entry["gram"] = gram;
    entry["count"] = count;
    entry["share"] = share;
    entry["display"] = format_percent(share);
    return entry;
}

nlohmann::json stats_json(const GraphStats& stats) {
    nlohmann::json doc;
    doc["node_count"] = stats.node_count;
    doc["edge_count"] = stats.edge_count;
    doc["max_depth"] = stats.max_depth;
    doc["branch_count"] = stats.branch_count;
    doc["leaf_count"] = stats.leaf_count;
    doc["widest_depth"] = stats.widest_depth;
    return doc;
}

nlohmann::json digest_json(const ContextDigest& digest) {
    nlohmann::json doc;
    doc["session_id"] = digest.session_id;
    doc["token_tail"] = digest.token_tail;
    doc["graph_summary"] = stats_json(digest.graph_summary);
    nlohmann::json bigrams = nlohmann::json::array();
    for (const auto& entry : digest.top_bigrams)
        bigrams.push_back(ngram_entry_json(entry.gram, entry.count, entry.share));
    doc["top_bigrams"] = bigrams;
    doc["current_phase"] = to_string(digest.current_phase);
    nlohmann::json triggers = nlohmann::json::array();
    for (const auto& trigger : digest.triggers) {
        nlohmann::json t;
        t["pattern"] = trigger.pattern;
        t["repetitions"] = trigger.repetitions;
        t["span"] = {trigger.span.first, trigger.span.second};
        t["threshold"] = trigger.threshold;
        triggers.push_back(t);
    }
    doc["triggers"] = triggers;
    doc["suggestions"] = digest.suggestions;
    return doc;
}

}  // namespace

std::string to_json(const LayoutedGraph& lg, const ExportSections& sections) {
    nlohmann::json doc;
    doc["meta"] = {{"session_id", lg.graph.session_id},
                   {"tool", kToolName},
                   {"version", kVersion}};

    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& [id, node] : lg.graph.nodes) {  // map order: sorted by id
        const Coord& coord = lg.coords.at(id);
        nlohmann::json n;
        n["node_id"] = node.node_id;
        n["kind"] = node.kind;
        n["origin"] = node.origin;
        n["created_global_seq"] = node.created_global_seq;
        n["created_at"] = format_timestamp(node.created_at);
        n["depth"] = node.depth;
        n["modify_seqs"] = node.modify_seqs;
        if (node.remove_seq)
            n["remove_seq"] = *node.remove_seq;
        else
            n["remove_seq"] = nullptr;
        n["x"] = coord.x;
        n["y"] = coord.y;
        nodes.push_back(n);
    }
    doc["nodes"] = nodes;

    std::vector<LineageEdge> sorted_edges = lg.graph.edges;
    std::sort(sorted_edges.begin(), sorted_edges.end());
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& edge : sorted_edges)
        edges.push_back({{"parent", edge.parent_id}, {"child", edge.child_id}});
    doc["edges"] = edges;

    doc["stats"] = sections.stats ? stats_json(*sections.stats) : nlohmann::json();
    if (sections.ngrams) {
        nlohmann::json ngrams;
        ngrams["n"] = sections.ngrams->n;
        ngrams["total"] = sections.ngrams->total;
        nlohmann::json grams = nlohmann::json::array();
        for (const auto& [gram, count] : sections.ngrams->counts) {
            const double share = sections.ngrams->total == 0
                                     ? 0.0
                                     : static_cast<double>(count) /
                                           static_cast<double>(sections.ngrams->total);
            grams.push_back(ngram_entry_json(gram, count, share));
        }
        ngrams["grams"] = grams;
        nlohmann::json top = nlohmann::json::array();
        if (sections.top)
            for (const auto& entry : *sections.top)
                top.push_back(ngram_entry_json(entry.gram, entry.count, entry.share));
        ngrams["top"] = top;
        doc["ngrams"] = ngrams;
    } else {
        doc["ngrams"] = nullptr;
    }
    if (sections.transitions) {
        nlohmann::json transitions;
        transitions["states"] = sections.transitions->states;
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& [pair, count] : sections.transitions->counts) {
            nlohmann::json entry;
            entry["from"] = pair.first;
            entry["to"] = pair.second;
            entry["count"] = count;
            const double prob = sections.transitions->probs.at(pair);
            entry["prob"] = prob;
            entry["display"] = format_percent(prob);
            entries.push_back(entry);
        }
        transitions["entries"] = entries;
        doc["transitions"] = transitions;
    } else {
        doc["transitions"] = nullptr;
    }
    doc["digest"] = sections.digest ? digest_json(*sections.digest) : nlohmann::json();
    return doc.dump(2) + "\n";
}

}  // namespace flowtrace
