#include "flowtrace/filter.hpp"

#include <json.hpp>

#include "flowtrace/mining.hpp"

namespace flowtrace {

namespace {

// Below this size the OpenMP fork/join overhead dominates.
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

}  // namespace

std::vector<Verdict> classify_all(const std::vector<RawEvent>& events, const RuleSet& rules,
                                  ExecMode mode) {
    std::vector<Verdict> verdicts(events.size());
    if (use_parallel(mode, events.size())) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(events.size()); ++i)
            verdicts[static_cast<std::size_t>(i)] =
                classify(events[static_cast<std::size_t>(i)], rules);
        return verdicts;
    }
    for (std::size_t i = 0; i < events.size(); ++i) verdicts[i] = classify(events[i], rules);
    return verdicts;
}

FilterResult apply_rules(const SessionLog& log, const RuleSet& rules, ExecMode mode) {
    FilterResult result;
    result.report.input_count = log.events.size();

    const std::vector<Verdict> verdicts = classify_all(log.events, rules, mode);
    std::uint32_t next_seq = 1;
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const Verdict& verdict = verdicts[i];
        if (verdict.keep) {
            ++result.report.kept_count;
            ++result.report.kept_by_move[verdict.move];
            result.moves.push_back(DesignMove{verdict.move, log.events[i], next_seq++});
        } else {
            ++result.report.discarded_count;
            ++result.report.discarded_by_reason[verdict.reason];
        }
    }
    if (result.report.input_count > 0)
        result.report.reduction_fraction =
            static_cast<double>(result.report.discarded_count) /
            static_cast<double>(result.report.input_count);
    return result;
}

std::string filter_report_json(const FilterReport& report) {
    nlohmann::json doc;
    doc["input_count"] = report.input_count;
    doc["kept_count"] = report.kept_count;
    doc["discarded_count"] = report.discarded_count;
    nlohmann::json by_reason = nlohmann::json::object();
    for (const auto& [reason, count] : report.discarded_by_reason) by_reason[reason] = count;
    doc["discarded_by_reason"] = by_reason;
    nlohmann::json by_move = nlohmann::json::object();
    for (const auto& [move, count] : report.kept_by_move) by_move[to_string(move)] = count;
    doc["kept_by_move"] = by_move;
    doc["reduction_fraction"] = report.reduction_fraction;
    doc["reduction_display"] = format_percent(report.reduction_fraction);
    return doc.dump(2) + "\n";
}

}  // namespace flowtrace
