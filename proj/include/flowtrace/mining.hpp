#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flowtrace/token.hpp"

namespace flowtrace {

using Gram = std::vector<std::string>;

struct NGramTable {
    int n = 2;
    std::map<Gram, std::uint64_t> counts;
    std::uint64_t total = 0;  // sequence length - n + 1, or 0 when shorter
};

struct NGramEntry {
    Gram gram;
    std::uint64_t count = 0;
    double share = 0.0;  // count / total

    bool operator==(const NGramEntry&) const = default;
};

// Sliding-window counts over consecutive token texts; no cross-session
// windows. Throws ValidationError for n < 1.
NGramTable count_ngrams(const TokenSequence& seq, int n,
                        ExecMode mode = ExecMode::autodetect);

// Sorted by count descending, ties by lexicographic gram ascending. Returns
// fewer than k entries when the table is small.
std::vector<NGramEntry> top_ngrams(const NGramTable& table, std::size_t k);

struct TransitionModel {
    std::vector<std::string> states;  // sorted distinct token texts
    std::map<std::pair<std::string, std::string>, std::uint64_t> counts;
    std::map<std::pair<std::string, std::string>, double> probs;  // P(to|from)
    std::map<std::string, std::uint64_t> outgoing_totals;
};

// First-order Markov model over consecutive token pairs. States include
// tokens that only ever appear last (zero outgoing counts).
TransitionModel build_markov(const TokenSequence& seq,
                             ExecMode mode = ExecMode::autodetect);

// Stored probability; 0.0 for unseen pairs; ValidationError when `from` is
// not a state.
double transition_prob(const TransitionModel& model, const std::string& from,
                       const std::string& to);

enum class PhaseLabel {
    setup,
    exploration,
    mixed,
};

std::string to_string(PhaseLabel label);

// SETUP when the MODIFY_* fraction reaches theta_setup; else EXPLORATION when
// the GENERATION_* fraction reaches theta_explore; else MIXED. SETUP takes
// precedence when both qualify.
PhaseLabel classify_phase(const std::vector<std::string>& window,
                          double theta_setup = 0.5, double theta_explore = 0.5);

// One-decimal percentage, round half up: 0.19072 -> "19.1%".
std::string format_percent(double fraction);

}  // namespace flowtrace
