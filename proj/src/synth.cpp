#include "flowtrace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "flowtrace/errors.hpp"
#include "flowtrace/export.hpp"

namespace flowtrace {

namespace {

// Splittable deterministic generator (splitmix64). All corpus randomness
// flows through one instance so equal specs give byte-identical output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Deterministic weighted choice over a sorted map.
    template <typename Key>
    Key pick(const std::map<Key, double>& weights) {
        double total = 0.0;
        for (const auto& [key, w] : weights) total += w;
        double draw = unit() * total;
        for (const auto& [key, w] : weights) {
            draw -= w;
            if (draw <= 0.0) return key;
        }
        return weights.rbegin()->first;
    }

private:
    std::uint64_t state_;
};

// Signal labels match exactly one KEEP rule of the default set and no
// DISCARD rule; noise labels match only DISCARD rules.
struct SignalLabel {
    const char* action;
    const char* source;
};

const std::vector<SignalLabel> kInsertLabels = {
    {"asset_import", "canvas"},
    {"node_created", "node_editor"},
    {"asset_insert", "toolbar"},
};
const std::vector<SignalLabel> kModifyLabels = {
    {"content_edit", "properties_panel"},
    {"param_update", "properties_panel"},
    {"metadata_update", "node_editor"},
    {"mask_modified", "canvas"},
};
const std::vector<SignalLabel> kGenerationLabels = {
    {"generation_run", "render_queue"},
    {"model_execute", "render_queue"},
};
const std::vector<SignalLabel> kRemoveLabels = {
    {"node_deleted", "canvas"},
    {"asset_removed", "node_editor"},
};

struct NoiseLabel {
    const char* action;
    const char* source;
    const char* origin;
    const char* reason;  // reason tag the default rules assign
};

const std::vector<NoiseLabel> kNoiseLabels = {
    {"temp_cache_purge", "cache_gc", "system", "cleanup"},
    {"asset_gc_sweep", "temp_pool", "system", "cleanup"},
    {"state_flush", "temp_cache", "system", "cleanup"},
    {"buffer_drop", "janitor", "system", "cleanup"},
    {"node_deleted", "cache_gc", "system", "cleanup"},
    {"connection_reroute", "graph_backend", "system", "rerouting"},
    {"edge_rewire", "graph_backend", "system", "rerouting"},
    {"link_refresh", "router_core", "system", "rerouting"},
    {"port_scan", "router_core", "system", "rerouting"},
    {"layout_recalc", "topology_daemon", "system", "rerouting"},
    {"render_progress", "worker_pool", "generated", "async_progress"},
    {"gen_heartbeat", "worker_pool", "generated", "async_progress"},
    {"tile_update", "progress_bus", "generated", "async_progress"},
    {"preview_swap", "intermediate_buffer", "generated", "async_progress"},
    {"state_snapshot", "state_sync", "system", "async_progress"},
};

const SignalLabel& label_for(MoveKind kind, std::size_t pick) {
    switch (kind) {
        case MoveKind::insert: return kInsertLabels[pick % kInsertLabels.size()];
        case MoveKind::modify: return kModifyLabels[pick % kModifyLabels.size()];
        case MoveKind::generation: return kGenerationLabels[pick % kGenerationLabels.size()];
        case MoveKind::remove: return kRemoveLabels[pick % kRemoveLabels.size()];
    }
    return kInsertLabels[0];
}

// One planned signal move; node_kind/parents are empty for modify/remove.
struct PlannedOp {
    MoveKind move;
    std::string node_id;
    std::string node_kind;
    std::vector<std::string> parents;
};

std::string event_id_for(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "e%06zu", index);
    return buf;
}

// Emits the final event stream: the planned signal ops with noise_slots[i]
// noise events before signal op i (and noise_slots[T] trailing), assigns
// ids/timestamps, and builds the ground truth alongside.
Corpus emit(const std::string& session_id, const std::vector<PlannedOp>& ops,
            const std::vector<std::size_t>& noise_slots, Rng& rng) {
    Corpus corpus;
    corpus.log.session_id = session_id;
    corpus.log.source_format = "csv";
    corpus.truth.graph.session_id = session_id;
    corpus.truth.tokens.session_id = session_id;

    TimestampMs now = 1709283600000;  // 2024-03-01T09:00:00.000Z
    std::size_t event_index = 0;
    std::uint32_t global_seq = 0;
    std::uint32_t modify_counter = 0;
    std::uint32_t remove_counter = 0;
    std::set<std::pair<std::string, std::string>> edge_set;
    std::size_t noise_count = 0;

    auto emit_noise = [&] {
        const NoiseLabel& label = kNoiseLabels[rng.below(kNoiseLabels.size())];
        RawEvent ev;
        ev.event_id = event_id_for(event_index++);
        now += 200 + static_cast<TimestampMs>(rng.below(800));
        ev.timestamp = now;
        ev.session_id = session_id;
        ev.action_type = label.action;
        ev.raw_source_label = label.source;
        ev.node_id = "tmp_" + std::to_string(rng.below(900) + 100);
        ev.node_kind = "other";
        ev.origin = label.origin;
        corpus.log.events.push_back(std::move(ev));
        ++corpus.truth.report.discarded_by_reason[label.reason];
        ++noise_count;
    };

    for (std::size_t i = 0; i <= ops.size(); ++i) {
        if (i < noise_slots.size())
            for (std::size_t k = 0; k < noise_slots[i]; ++k) emit_noise();
        if (i == ops.size()) break;

        const PlannedOp& op = ops[i];
        const SignalLabel& label = label_for(op.move, rng.below(64));
        RawEvent ev;
        ev.event_id = event_id_for(event_index++);
        now += 200 + static_cast<TimestampMs>(rng.below(800));
        ev.timestamp = now;
        ev.session_id = session_id;
        ev.action_type = label.action;
        ev.raw_source_label = label.source;
        ev.node_id = op.node_id;
        ev.origin = "user";
        ev.connected_from = op.parents;

        ++global_seq;
        switch (op.move) {
            case MoveKind::insert:
            case MoveKind::generation: {
                ev.node_kind = op.node_kind;
                AssetNode node;
                node.node_id = op.node_id;
                node.kind = op.node_kind;
                node.origin = op.move == MoveKind::generation ? "generated" : "manual";
                node.created_global_seq = global_seq;
                node.created_at = ev.timestamp;
                std::uint32_t depth = 0;
                for (const auto& parent : op.parents)
                    depth = std::max(depth, corpus.truth.graph.nodes.at(parent).depth + 1);
                node.depth = depth;
                corpus.truth.graph.max_depth =
                    std::max(corpus.truth.graph.max_depth, depth);
                corpus.truth.graph.nodes.emplace(op.node_id, std::move(node));
                for (const auto& parent : op.parents)
                    if (edge_set.emplace(parent, op.node_id).second)
                        corpus.truth.graph.edges.push_back(LineageEdge{parent, op.node_id});
                break;
            }
            case MoveKind::modify:
                ev.node_kind = corpus.truth.graph.nodes.at(op.node_id).kind;
                corpus.truth.graph.nodes.at(op.node_id).modify_seqs.push_back(++modify_counter);
                break;
            case MoveKind::remove:
                ev.node_kind = corpus.truth.graph.nodes.at(op.node_id).kind;
                corpus.truth.graph.nodes.at(op.node_id).remove_seq = ++remove_counter;
                break;
        }

        corpus.truth.tokens.tokens.push_back(make_token(op.move, ev.node_kind));
        ++corpus.truth.report.kept_by_move[op.move];
        corpus.truth.moves.push_back(DesignMove{op.move, ev, global_seq});
        corpus.log.events.push_back(std::move(ev));
    }

    corpus.truth.report.input_count = ops.size() + noise_count;
    corpus.truth.report.kept_count = ops.size();
    corpus.truth.report.discarded_count = noise_count;
    if (corpus.truth.report.input_count > 0)
        corpus.truth.report.reduction_fraction =
            static_cast<double>(noise_count) /
            static_cast<double>(corpus.truth.report.input_count);
    return corpus;
}

std::vector<std::size_t> draw_noise_slots(std::size_t signal_count, std::size_t noise_count,
                                          Rng& rng) {
    std::vector<std::size_t> slots(signal_count + 1, 0);
    for (std::size_t i = 0; i < noise_count; ++i) ++slots[rng.below(slots.size())];
    return slots;
}

void validate_spec(const ScenarioSpec& spec) {
    auto check_mix = [](const auto& mix, const char* name) {
        double total = 0.0;
        for (const auto& [key, value] : mix) {
            if (value < 0.0) throw ValidationError(std::string(name) + " has a negative weight");
            total += value;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ValidationError(std::string(name) + " must sum to 1");
    };
    check_mix(spec.move_mix, "move_mix");
    check_mix(spec.kinds_mix, "kinds_mix");
    if (spec.kinds_mix.empty()) throw ValidationError("kinds_mix is empty");
    if (spec.n_roots < 1) throw ValidationError("n_roots must be >= 1");
    if (spec.branch_factor.lo < 1 || spec.branch_factor.hi < spec.branch_factor.lo)
        throw ValidationError("branch_factor range is empty");
    if (spec.chain_depth.hi < spec.chain_depth.lo)
        throw ValidationError("chain_depth range is empty");
    if (spec.noise_ratio < 0.0 || spec.noise_ratio >= 1.0)
        throw ValidationError("noise_ratio must lie in [0, 1)");
    if (spec.max_signal_moves < spec.n_roots)
        throw ValidationError("max_signal_moves is smaller than n_roots");
    const double creation_mass = spec.move_mix.count(MoveKind::insert)
                                     ? spec.move_mix.at(MoveKind::insert)
                                     : 0.0;
    const double generation_mass = spec.move_mix.count(MoveKind::generation)
                                       ? spec.move_mix.at(MoveKind::generation)
                                       : 0.0;
    if (creation_mass + generation_mass <= 0.0)
        throw ValidationError("move_mix must give INSERT+GENERATION positive mass");
}

std::uint32_t draw_range(const CountRange& range, Rng& rng) {
    return range.lo + static_cast<std::uint32_t>(rng.below(range.hi - range.lo + 1));
}

double mix_weight(const std::map<MoveKind, double>& mix, MoveKind kind) {
    const auto it = mix.find(kind);
    return it == mix.end() ? 0.0 : it->second;
}

}  // namespace

Corpus generate(const ScenarioSpec& spec) {
    validate_spec(spec);
    Rng rng(spec.seed);

    // Phase 1: structural creations (roots, then breadth-first growth).
    const double w_insert = mix_weight(spec.move_mix, MoveKind::insert);
    const double w_generation = mix_weight(spec.move_mix, MoveKind::generation);
    const double creation_share = w_insert + w_generation;
    const auto creation_cap = static_cast<std::size_t>(std::max<double>(
        spec.n_roots, std::llround(spec.max_signal_moves * creation_share)));

    std::vector<PlannedOp> creations;
    std::vector<std::string> node_ids;
    std::unordered_map<std::string, std::uint32_t> depth_of;
    std::deque<std::pair<std::string, std::uint32_t>> frontier;  // (node, target depth)
    std::size_t next_node = 1;
    auto fresh_node = [&] { return "n" + std::to_string(next_node++); };

    for (std::uint32_t r = 0; r < spec.n_roots && creations.size() < creation_cap; ++r) {
        const std::string id = fresh_node();
        creations.push_back({MoveKind::insert, id, rng.pick(spec.kinds_mix), {}});
        node_ids.push_back(id);
        depth_of[id] = 0;
        frontier.emplace_back(id, draw_range(spec.chain_depth, rng));
    }
    while (!frontier.empty() && creations.size() < creation_cap) {
        const auto [parent, target_depth] = frontier.front();
        frontier.pop_front();
        if (depth_of[parent] >= target_depth) continue;
        const std::uint32_t children = draw_range(spec.branch_factor, rng);
        for (std::uint32_t c = 0; c < children && creations.size() < creation_cap; ++c) {
            const std::string id = fresh_node();
            std::vector<std::string> parents{parent};
            if (node_ids.size() >= 2 && rng.unit() < 0.2) {
                const std::string& extra = node_ids[rng.below(node_ids.size())];
                if (extra != parent) parents.push_back(extra);
            }
            const bool generated =
                rng.unit() < (creation_share > 0 ? w_generation / creation_share : 1.0);
            creations.push_back({generated ? MoveKind::generation : MoveKind::insert, id,
                                 rng.pick(spec.kinds_mix), parents});
            std::uint32_t depth = 0;
            for (const auto& p : parents) depth = std::max(depth, depth_of[p] + 1);
            depth_of[id] = depth;
            node_ids.push_back(id);
            frontier.emplace_back(id, target_depth);
        }
    }

    // Phase 2: weave MODIFY/REMOVE quotas between creations.
    const std::size_t k_creations = creations.size();
    std::size_t n_modify =
        creation_share > 0
            ? static_cast<std::size_t>(std::llround(
                  static_cast<double>(k_creations) *
                  mix_weight(spec.move_mix, MoveKind::modify) / creation_share))
            : 0;
    std::size_t n_remove =
        creation_share > 0
            ? static_cast<std::size_t>(std::llround(
                  static_cast<double>(k_creations) *
                  mix_weight(spec.move_mix, MoveKind::remove) / creation_share))
            : 0;
    while (k_creations + n_modify + n_remove > spec.max_signal_moves) {
        if (n_modify >= n_remove && n_modify > 0)
            --n_modify;
        else if (n_remove > 0)
            --n_remove;
        else
            break;
    }

    // A node may be removed only once no later creation references it.
    std::unordered_map<std::string, std::size_t> last_parent_use;
    for (std::size_t i = 0; i < creations.size(); ++i)
        for (const auto& parent : creations[i].parents) last_parent_use[parent] = i;

    std::vector<PlannedOp> ops;
    ops.reserve(k_creations + n_modify + n_remove);
    std::vector<std::string> live;
    std::size_t modify_done = 0, remove_done = 0;

    auto emit_modify = [&] {
        const std::string& target = live[rng.below(live.size())];
        ops.push_back({MoveKind::modify, target, {}, {}});
        ++modify_done;
    };
    auto try_emit_remove = [&](std::size_t creation_index) {
        if (live.size() < 2) return false;
        std::vector<std::string> eligible;
        for (const auto& id : live) {
            const auto use = last_parent_use.find(id);
            if (use == last_parent_use.end() || use->second <= creation_index)
                eligible.push_back(id);
        }
        if (eligible.empty()) return false;
        const std::string target = eligible[rng.below(eligible.size())];
        ops.push_back({MoveKind::remove, target, {}, {}});
        live.erase(std::find(live.begin(), live.end(), target));
        ++remove_done;
        return true;
    };

    for (std::size_t i = 0; i < creations.size(); ++i) {
        ops.push_back(creations[i]);
        live.push_back(creations[i].node_id);
        const std::size_t want_modify = static_cast<std::size_t>(std::llround(
            static_cast<double>(n_modify) * static_cast<double>(i + 1) /
            static_cast<double>(k_creations)));
        while (modify_done < want_modify) emit_modify();
        const std::size_t want_remove = static_cast<std::size_t>(std::llround(
            static_cast<double>(n_remove) * static_cast<double>(i + 1) /
            static_cast<double>(k_creations)));
        while (remove_done < want_remove && try_emit_remove(i)) {
        }
    }
    while (remove_done < n_remove && try_emit_remove(creations.size())) {
    }

    // Phase 3: noise slots, then emission.
    const std::size_t n_noise = static_cast<std::size_t>(std::llround(
        spec.noise_ratio / (1.0 - spec.noise_ratio) * static_cast<double>(ops.size())));
    const std::vector<std::size_t> slots = draw_noise_slots(ops.size(), n_noise, rng);
    return emit("synth-" + std::to_string(spec.seed), ops, slots, rng);
}

namespace {

// Budgeted script with exact per-move counts; used by the pilot corpora.
std::vector<PlannedOp> budgeted_ops(std::size_t n_insert, std::size_t n_modify,
                                    std::size_t n_generation, std::size_t n_remove,
                                    const std::map<std::string, double>& kinds_mix, Rng& rng) {
    std::vector<PlannedOp> ops;
    std::vector<std::string> live;
    std::size_t next_node = 1;
    auto fresh_node = [&] { return "n" + std::to_string(next_node++); };

    std::map<MoveKind, std::size_t> budget{
        {MoveKind::insert, n_insert},
        {MoveKind::modify, n_modify},
        {MoveKind::generation, n_generation},
        {MoveKind::remove, n_remove},
    };
    while (true) {
        std::map<MoveKind, double> weights;
        for (const auto& [kind, remaining] : budget) {
            if (remaining == 0) continue;
            if (kind == MoveKind::modify && live.empty()) continue;
            if (kind == MoveKind::remove && live.size() < 2) continue;
            if (kind == MoveKind::generation && live.empty()) continue;
            weights[kind] = static_cast<double>(remaining);
        }
        if (weights.empty()) break;
        const MoveKind kind = rng.pick(weights);
        --budget[kind];
        switch (kind) {
            case MoveKind::insert: {
                const std::string id = fresh_node();
                std::vector<std::string> parents;
                if (!live.empty() && rng.unit() < 0.15)
                    parents.push_back(live[rng.below(live.size())]);
                ops.push_back({MoveKind::insert, id, rng.pick(kinds_mix), parents});
                live.push_back(id);
                break;
            }
            case MoveKind::generation: {
                const std::string id = fresh_node();
                std::vector<std::string> parents{live[rng.below(live.size())]};
                if (live.size() >= 2 && rng.unit() < 0.2) {
                    const std::string& extra = live[rng.below(live.size())];
                    if (extra != parents.front()) parents.push_back(extra);
                }
                ops.push_back({MoveKind::generation, id, rng.pick(kinds_mix), parents});
                live.push_back(id);
                break;
            }
            case MoveKind::modify:
                ops.push_back({MoveKind::modify, live[rng.below(live.size())], {}, {}});
                break;
            case MoveKind::remove: {
                const std::size_t at = rng.below(live.size());
                ops.push_back({MoveKind::remove, live[at], {}, {}});
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(at));
                break;
            }
        }
    }
    return ops;
}

Corpus make_pilot_927() {
    Rng rng(927563);
    // 96 + 260 + 144 + 63 signal moves = 563, plus 364 noise events = 927.
    std::vector<PlannedOp> ops = budgeted_ops(
        96, 260, 144, 63, {{"prompt", 0.15}, {"image", 0.65}, {"video", 0.2}}, rng);
    const std::vector<std::size_t> slots = draw_noise_slots(ops.size(), 364, rng);
    return emit("pilot_927", ops, slots, rng);
}

// The frozen pilot token stream: 195 tokens whose bigram and transition
// statistics reproduce the published pilot aggregates exactly (top bigram
// GENERATION_image x2 37/194; 16 of 23 INSERT_image outgoing transitions to
// MODIFY_image; 37 of 56 GENERATION_image outgoing to itself).
//   P INSERT_prompt   Q MODIFY_prompt   I INSERT_image
//   M MODIFY_image    G GENERATION_image   R REMOVE_image
constexpr const char* kPilotTokenScript =
    "PQIGGGMMMPQQIGGGMMMIGGGMMMRPQQIGGGMMMIGGGMMMPQQIGGGMMRIGGGMMMPQQIMGGGMMRIMGGGMMMPQQ"
    "IMGGGMMRIMGGGMMMPQQIMGGGMMRIMGGGMMMPQQIMGGGMMRIMGGGMMMPQQIMGGGMMRIMGGGMMMPQQIMGGGMMR"
    "IMGGMMMPQQIMMRIMMMPQQIMMRIMM";

Corpus make_pilot_tokens(const std::string& session_id) {
    Rng rng(195194);
    std::vector<PlannedOp> ops;
    std::vector<std::string> prompts;
    std::vector<std::string> images;  // live image-kind nodes, oldest first
    std::size_t next_prompt = 1;
    std::size_t next_image = 1;
    std::size_t next_gen = 1;

    for (const char* c = kPilotTokenScript; *c; ++c) {
        switch (*c) {
            case 'P': {
                const std::string id = "p" + std::to_string(next_prompt++);
                ops.push_back({MoveKind::insert, id, "prompt", {}});
                prompts.push_back(id);
                break;
            }
            case 'Q':
                ops.push_back({MoveKind::modify, prompts.back(), {}, {}});
                break;
            case 'I': {
                const std::string id = "img" + std::to_string(next_image++);
                ops.push_back({MoveKind::insert, id, "image", {}});
                images.push_back(id);
                break;
            }
            case 'M':
                ops.push_back({MoveKind::modify, images.back(), {}, {}});
                break;
            case 'G': {
                const std::string id = "gen" + std::to_string(next_gen++);
                std::vector<std::string> parents{images.back()};
                if (!prompts.empty()) parents.push_back(prompts.back());
                ops.push_back({MoveKind::generation, id, "image", parents});
                images.push_back(id);
                break;
            }
            case 'R':
                ops.push_back({MoveKind::remove, images.back(), {}, {}});
                images.pop_back();
                break;
        }
    }
    return emit(session_id, ops, std::vector<std::size_t>(ops.size() + 1, 0), rng);
}

// Small branching prompt/image/video session: three parallel variations off
// one prompt+reference pair, one abandoned, then a deep refinement chain
// ending in video.
Corpus make_figure1_like() {
    Rng rng(101);
    std::vector<PlannedOp> ops = {
        {MoveKind::insert, "p1", "prompt", {}},
        {MoveKind::modify, "p1", {}, {}},
        {MoveKind::insert, "i1", "image", {}},
        {MoveKind::generation, "g1", "image", {"p1", "i1"}},
        {MoveKind::generation, "g2", "image", {"p1", "i1"}},
        {MoveKind::generation, "g3", "image", {"p1"}},
        {MoveKind::modify, "g1", {}, {}},
        {MoveKind::remove, "g3", {}, {}},
        {MoveKind::generation, "g4", "image", {"g1"}},
        {MoveKind::modify, "p1", {}, {}},
        {MoveKind::generation, "g5", "image", {"g1"}},
        {MoveKind::remove, "g2", {}, {}},
        {MoveKind::modify, "g4", {}, {}},
        {MoveKind::generation, "v1", "video", {"g4", "p1"}},
        {MoveKind::modify, "v1", {}, {}},
        {MoveKind::generation, "v2", "video", {"v1"}},
    };
    std::vector<std::size_t> slots(ops.size() + 1, 0);
    slots[2] = 1;
    slots[7] = 1;
    slots[11] = 1;
    slots[15] = 1;
    return emit("figure1_like", ops, slots, rng);
}

}  // namespace

std::map<std::string, Corpus> paper_fixtures() {
    std::map<std::string, Corpus> fixtures;
    fixtures.emplace("pilot_927", make_pilot_927());
    fixtures.emplace("pilot_bigrams", make_pilot_tokens("pilot_bigrams"));
    fixtures.emplace("pilot_transitions", make_pilot_tokens("pilot_transitions"));
    fixtures.emplace("figure1_like", make_figure1_like());
    return fixtures;
}

std::string ground_truth_json(const GroundTruth& truth) {
    const GraphStats stats = graph_stats(truth.graph);
    ExportSections sections;
    sections.stats = &stats;
    nlohmann::json doc;
    doc["graph"] = nlohmann::json::parse(to_json(layout(truth.graph), sections));
    nlohmann::json moves = nlohmann::json::array();
    for (const auto& move : truth.moves)
        moves.push_back({{"event_id", move.event.event_id},
                         {"global_seq", move.global_seq},
                         {"move", to_string(move.move)}});
    doc["moves"] = moves;
    doc["report"] = nlohmann::json::parse(filter_report_json(truth.report));
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto& token : truth.tokens.tokens) tokens.push_back(token.text);
    doc["tokens"] = tokens;
    return doc.dump(2) + "\n";
}

}  // namespace flowtrace
