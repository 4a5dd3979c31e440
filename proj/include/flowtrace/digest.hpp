#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flowtrace/graph.hpp"
#include "flowtrace/mining.hpp"

namespace flowtrace {

struct PatternTrigger {
    Gram pattern;  // length 1..max_pattern_len
    std::uint32_t repetitions = 0;
    std::pair<std::size_t, std::size_t> span;  // [start, end) in the sequence
    std::uint32_t threshold = 0;  // configured minimum repetitions

    bool operator==(const PatternTrigger&) const = default;
};

// Reports every maximal consecutive repetition of a pattern of length
// 1..max_pattern_len occurring at least `threshold` times. A repetition is
// reported once at its maximal extent (runs that are a phase-shift or a
// truncation of a longer periodic stretch are folded into it), and a shorter
// pattern whose span is identical to a longer pattern's is suppressed.
// Ordered by (span start, pattern length, span end).
std::vector<PatternTrigger> detect_repetition(const TokenSequence& seq,
                                              std::size_t max_pattern_len = 3,
                                              std::uint32_t threshold = 5);

struct DigestOptions {
    std::size_t tail = 20;          // W: token texts kept in the tail
    std::size_t top_k = 5;          // bigrams and dominant transitions kept
    std::size_t phase_window = 5;   // tokens classified for current_phase
    double theta_setup = 0.5;
    double theta_explore = 0.5;
};

// Compact deterministic summary of one session's workflow history, sized for
// an agent context window. Rendered length is bounded by roughly
//   120 + (L+1)*W + (2*L+48)*k + (3*L+64)*T
// characters for token length <= L, tail W, top-k k and T triggers.
struct ContextDigest {
    std::string session_id;
    std::vector<std::string> token_tail;  // last W token texts
    GraphStats graph_summary;
    std::vector<NGramEntry> top_bigrams;
    PhaseLabel current_phase = PhaseLabel::mixed;
    std::vector<PatternTrigger> triggers;
    std::vector<std::string> suggestions;
};

// Assembles the digest from per-session analysis results. All inputs must
// describe the same session (ValidationError otherwise). Suggestions carry
// one templated line per trigger plus one per dominant transition (the most
// probable next token of a state, probability >= 0.5, at most top_k states
// ordered by outgoing count).
ContextDigest build_digest(const WorkflowGraph& graph, const TokenSequence& tokens,
                           const NGramTable& bigrams, const TransitionModel& model,
                           const std::vector<PatternTrigger>& triggers,
                           const DigestOptions& options = {});

// Deterministic plain-text rendering with fixed section order: summary,
// phase, recent tokens, top bigrams, triggers, suggestions.
std::string render_digest_text(const ContextDigest& digest);

}  // namespace flowtrace
