#include "flowtrace/digest.hpp"

#include <algorithm>
#include <sstream>

#include "flowtrace/errors.hpp"

namespace flowtrace {

namespace {

std::string join_pattern(const Gram& pattern) {
    std::string out;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (i) out += "->";
        out += pattern[i];
    }
    return out;
}

}  // namespace

std::vector<PatternTrigger> detect_repetition(const TokenSequence& seq,
                                              std::size_t max_pattern_len,
                                              std::uint32_t threshold) {
    if (max_pattern_len < 1) throw ValidationError("max pattern length must be >= 1");
    if (threshold < 2) throw ValidationError("repetition threshold must be >= 2");

    const std::vector<std::string> texts = seq.texts();
    const std::size_t n = texts.size();
    std::vector<PatternTrigger> triggers;

    for (std::size_t len = 1; len <= max_pattern_len && len * 2 <= n; ++len) {
        // Maximal periodic stretches: runs of consecutive j with
        // texts[j] == texts[j + len]. A run [s, q) covers tokens [s, q + len).
        std::size_t j = 0;
        while (j + len < n) {
            if (texts[j] != texts[j + len]) {
                ++j;
                continue;
            }
            const std::size_t start = j;
            while (j + len < n && texts[j] == texts[j + len]) ++j;
            const std::size_t covered = (j - start) + len;  // tokens in the stretch
            const std::size_t reps = covered / len;
            if (reps >= threshold) {
                PatternTrigger trigger;
                trigger.pattern.assign(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                       texts.begin() + static_cast<std::ptrdiff_t>(start + len));
                trigger.repetitions = static_cast<std::uint32_t>(reps);
                trigger.span = {start, start + reps * len};
                trigger.threshold = threshold;
                triggers.push_back(std::move(trigger));
            }
        }
    }

    // A shorter pattern whose span equals a longer pattern's is subsumed.
    std::sort(triggers.begin(), triggers.end(),
              [](const PatternTrigger& a, const PatternTrigger& b) {
                  if (a.span != b.span) return a.span < b.span;
                  return a.pattern.size() > b.pattern.size();
              });
    std::vector<PatternTrigger> kept;
    for (auto& trigger : triggers) {
        if (!kept.empty() && kept.back().span == trigger.span) continue;
        kept.push_back(std::move(trigger));
    }
    std::sort(kept.begin(), kept.end(), [](const PatternTrigger& a, const PatternTrigger& b) {
        if (a.span.first != b.span.first) return a.span.first < b.span.first;
        if (a.pattern.size() != b.pattern.size()) return a.pattern.size() < b.pattern.size();
        return a.span.second < b.span.second;
    });
    return kept;
}

ContextDigest build_digest(const WorkflowGraph& graph, const TokenSequence& tokens,
                           const NGramTable& bigrams, const TransitionModel& model,
                           const std::vector<PatternTrigger>& triggers,
                           const DigestOptions& options) {
    if (graph.session_id != tokens.session_id)
        throw ValidationError("digest inputs describe different sessions (\"" +
                              graph.session_id + "\" vs \"" + tokens.session_id + "\")");

    ContextDigest digest;
    digest.session_id = tokens.session_id;

    const std::vector<std::string> texts = tokens.texts();
    const std::size_t tail =
        std::min(options.tail, texts.size());
    digest.token_tail.assign(texts.end() - static_cast<std::ptrdiff_t>(tail), texts.end());

    digest.graph_summary = graph_stats(graph);
    digest.top_bigrams = top_ngrams(bigrams, options.top_k);

    if (texts.empty()) {
        digest.current_phase = PhaseLabel::mixed;
    } else {
        const std::size_t window = std::min(options.phase_window, texts.size());
        digest.current_phase = classify_phase(
            std::vector<std::string>(texts.end() - static_cast<std::ptrdiff_t>(window),
                                     texts.end()),
            options.theta_setup, options.theta_explore);
    }

    digest.triggers = triggers;
    for (const auto& trigger : digest.triggers) {
        std::ostringstream line;
        line << "Detected " << join_pattern(trigger.pattern) << " repeated "
             << trigger.repetitions << " times; offer to automate this step.";
        digest.suggestions.push_back(line.str());
    }

    // Dominant transitions: the most probable next token per state, when that
    // probability reaches 0.5; at most top_k states, heaviest outgoing first.
    struct Dominant {
        std::string from, to;
        double prob;
        std::uint64_t outgoing;
    };
    std::vector<Dominant> dominants;
    for (const auto& [state, outgoing] : model.outgoing_totals) {
        if (outgoing < 2) continue;
        std::string best_to;
        std::uint64_t best_count = 0;
        for (auto it = model.counts.lower_bound({state, std::string()});
             it != model.counts.end() && it->first.first == state; ++it) {
            if (it->second > best_count) {
                best_count = it->second;
                best_to = it->first.second;
            }
        }
        const double prob =
            static_cast<double>(best_count) / static_cast<double>(outgoing);
        if (prob >= 0.5) dominants.push_back({state, best_to, prob, outgoing});
    }
    std::sort(dominants.begin(), dominants.end(), [](const Dominant& a, const Dominant& b) {
        if (a.outgoing != b.outgoing) return a.outgoing > b.outgoing;
        return a.from < b.from;
    });
    if (dominants.size() > options.top_k) dominants.resize(options.top_k);
    for (const auto& dominant : dominants) {
        std::ostringstream line;
        line << "After " << dominant.from << ", users proceed to " << dominant.to
             << " with probability " << format_percent(dominant.prob)
             << "; consider pre-staging " << dominant.to << ".";
        digest.suggestions.push_back(line.str());
    }
    return digest;
}

std::string render_digest_text(const ContextDigest& digest) {
    std::ostringstream out;
    out << "== workflow digest: session " << digest.session_id << " ==\n";
    if (digest.token_tail.empty() && digest.graph_summary.node_count == 0) {
        out << "no activity\n";
        return out.str();
    }
    const GraphStats& g = digest.graph_summary;
    out << "graph: nodes=" << g.node_count << " edges=" << g.edge_count
        << " max_depth=" << g.max_depth << " branches=" << g.branch_count
        << " leaves=" << g.leaf_count << " widest_depth=" << g.widest_depth << "\n";
    out << "phase: " << to_string(digest.current_phase) << "\n";
    out << "recent tokens:";
    if (digest.token_tail.empty()) {
        out << " none";
    } else {
        for (const auto& text : digest.token_tail) out << " " << text;
    }
    out << "\n";
    out << "top bigrams:\n";
    if (digest.top_bigrams.empty()) out << "  none\n";
    for (std::size_t i = 0; i < digest.top_bigrams.size(); ++i) {
        const NGramEntry& entry = digest.top_bigrams[i];
        out << "  " << (i + 1) << ". " << join_pattern(entry.gram) << " count=" << entry.count
            << " share=" << format_percent(entry.share) << "\n";
    }
    out << "triggers:\n";
    if (digest.triggers.empty()) out << "  none\n";
    for (const auto& trigger : digest.triggers) {
        out << "  - " << join_pattern(trigger.pattern) << " repeated " << trigger.repetitions
            << "x at [" << trigger.span.first << "," << trigger.span.second << ")\n";
    }
    out << "suggestions:\n";
    if (digest.suggestions.empty()) out << "  none\n";
    for (const auto& suggestion : digest.suggestions) out << "  - " << suggestion << "\n";
    return out.str();
}

}  // namespace flowtrace
