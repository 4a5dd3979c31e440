#include "flowtrace/mining.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flowtrace/errors.hpp"

namespace flowtrace {

namespace {

constexpr std::size_t kParallelThreshold = 4096;

bool use_parallel(ExecMode mode, std::size_t n) {
#ifdef _OPENMP
    if (mode == ExecMode::parallel) return true;
    if (mode == ExecMode::autodetect) return n >= kParallelThreshold;
#else
    (void)mode;
    (void)n;
#endif
    return false;
}

// Chunked window counting with a per-thread table merged under a lock.
// Counts are commutative sums, so the merged table is identical to the
// serial one regardless of merge order.
template <typename Key, typename MakeKey>
std::map<Key, std::uint64_t> count_windows(std::size_t windows, ExecMode mode,
                                           MakeKey make_key) {
    std::map<Key, std::uint64_t> counts;
    if (!use_parallel(mode, windows)) {
        for (std::size_t i = 0; i < windows; ++i) ++counts[make_key(i)];
        return counts;
    }
#ifdef _OPENMP
#pragma omp parallel
    {
        std::map<Key, std::uint64_t> local;
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(windows); ++i)
            ++local[make_key(static_cast<std::size_t>(i))];
#pragma omp critical(flowtrace_merge_counts)
        for (const auto& [key, count] : local) counts[key] += count;
    }
#endif
    return counts;
}

}  // namespace

NGramTable count_ngrams(const TokenSequence& seq, int n, ExecMode mode) {
    if (n < 1) throw ValidationError("n-gram order must be >= 1, got " + std::to_string(n));
    NGramTable table;
    table.n = n;
    const std::vector<std::string> texts = seq.texts();
    if (texts.size() < static_cast<std::size_t>(n)) return table;  // total 0

    const std::size_t windows = texts.size() - static_cast<std::size_t>(n) + 1;
    table.counts = count_windows<Gram>(windows, mode, [&](std::size_t i) {
        return Gram(texts.begin() + static_cast<std::ptrdiff_t>(i),
                    texts.begin() + static_cast<std::ptrdiff_t>(i + n));
    });
    table.total = windows;
    return table;
}

std::vector<NGramEntry> top_ngrams(const NGramTable& table, std::size_t k) {
    std::vector<NGramEntry> entries;
    entries.reserve(table.counts.size());
    for (const auto& [gram, count] : table.counts) {
        NGramEntry entry;
        entry.gram = gram;
        entry.count = count;
        entry.share = table.total == 0
                          ? 0.0
                          : static_cast<double>(count) / static_cast<double>(table.total);
        entries.push_back(std::move(entry));
    }
    std::sort(entries.begin(), entries.end(), [](const NGramEntry& a, const NGramEntry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.gram < b.gram;
    });
    if (entries.size() > k) entries.resize(k);
    return entries;
}

TransitionModel build_markov(const TokenSequence& seq, ExecMode mode) {
    TransitionModel model;
    const std::vector<std::string> texts = seq.texts();

    std::set<std::string> states(texts.begin(), texts.end());
    model.states.assign(states.begin(), states.end());

    if (texts.size() >= 2) {
        model.counts = count_windows<std::pair<std::string, std::string>>(
            texts.size() - 1, mode,
            [&](std::size_t i) { return std::make_pair(texts[i], texts[i + 1]); });
    }
    for (const auto& [pair, count] : model.counts) model.outgoing_totals[pair.first] += count;
    for (const auto& [pair, count] : model.counts)
        model.probs[pair] = static_cast<double>(count) /
                            static_cast<double>(model.outgoing_totals.at(pair.first));
    return model;
}

double transition_prob(const TransitionModel& model, const std::string& from,
                       const std::string& to) {
    if (!std::binary_search(model.states.begin(), model.states.end(), from))
        throw ValidationError("unknown Markov state \"" + from + "\"");
    const auto it = model.probs.find({from, to});
    return it == model.probs.end() ? 0.0 : it->second;
}

std::string to_string(PhaseLabel label) {
    switch (label) {
        case PhaseLabel::setup: return "SETUP";
        case PhaseLabel::exploration: return "EXPLORATION";
        case PhaseLabel::mixed: return "MIXED";
    }
    return "MIXED";
}

PhaseLabel classify_phase(const std::vector<std::string>& window, double theta_setup,
                          double theta_explore) {
    if (window.empty()) throw ValidationError("phase window is empty");
    if (theta_setup <= 0.0 || theta_setup > 1.0 || theta_explore <= 0.0 || theta_explore > 1.0)
        throw ValidationError("phase thresholds must lie in (0, 1]");

    std::size_t modify = 0;
    std::size_t generation = 0;
    for (const auto& text : window) {
        if (text.rfind("MODIFY_", 0) == 0) ++modify;
        if (text.rfind("GENERATION_", 0) == 0) ++generation;
    }
    const double size = static_cast<double>(window.size());
    if (static_cast<double>(modify) / size >= theta_setup) return PhaseLabel::setup;
    if (static_cast<double>(generation) / size >= theta_explore) return PhaseLabel::exploration;
    return PhaseLabel::mixed;
}

std::string format_percent(double fraction) {
    // One decimal, round half up: 0.6607 -> "66.1%".
    const long long tenths = std::llround(fraction * 1000.0);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%lld%%", tenths / 10, tenths % 10);
    return buf;
}

}  // namespace flowtrace
