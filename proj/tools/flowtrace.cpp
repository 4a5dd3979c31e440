// flowtrace CLI: reconstructs creative workflow structure from raw
// node-editor event logs. Subcommands expose each pipeline stage; `run`
// composes them end to end and writes every artifact in one pass.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowtrace/digest.hpp"
#include "flowtrace/errors.hpp"
#include "flowtrace/export.hpp"
#include "flowtrace/filter.hpp"
#include "flowtrace/graph.hpp"
#include "flowtrace/ingest.hpp"
#include "flowtrace/mining.hpp"
#include "flowtrace/rules.hpp"
#include "flowtrace/synth.hpp"
#include "flowtrace/token.hpp"
#include "flowtrace/version.hpp"

namespace fs = std::filesystem;
using namespace flowtrace;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Artifacts are buffered and written in one pass so a failing stage leaves
// no partial outputs behind.
class ArtifactSet {
public:
    void add(std::string name, std::string content) {
        names_.push_back(name);
        contents_[std::move(name)] = std::move(content);
    }

    void write_all(const std::string& out_dir) const {
        fs::create_directories(out_dir);
        std::vector<fs::path> written;
        try {
            for (const auto& name : names_) {
                const fs::path path = fs::path(out_dir) / name;
                std::ofstream out(path, std::ios::binary);
                if (!out) throw UsageError("cannot write \"" + path.string() + "\"");
                out << contents_.at(name);
                if (!out) throw UsageError("short write to \"" + path.string() + "\"");
                written.push_back(path);
            }
        } catch (...) {
            for (const auto& path : written) {
                std::error_code ec;
                fs::remove(path, ec);
            }
            throw;
        }
    }

    void maybe_print(const std::string& which) const {
        if (which.empty()) return;
        static const std::map<std::string, std::string> aliases = {
            {"report", "report.json"},   {"events", "events.csv"},
            {"moves", "moves.csv"},      {"tokens", "tokens.txt"},
            {"mining", "mining.json"},   {"digest", "digest.txt"},
            {"graph.dot", "graph.dot"},  {"graph.json", "graph.json"},
            {"ingest-report", "ingest_report.json"},
        };
        const auto alias = aliases.find(which);
        const std::string name = alias == aliases.end() ? which : alias->second;
        const auto it = contents_.find(name);
        if (it == contents_.end())
            throw UsageError("no artifact \"" + which + "\" produced by this command");
        std::cout << it->second;
    }

    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::map<std::string, std::string> contents_;
};

struct IoFlags {
    std::string input;
    std::string format = "csv";
    std::string rules_path;
    std::string out_dir = ".";
    bool lenient = false;
    std::string stdout_artifact;
};

struct AnalysisFlags {
    std::size_t window = 20;
    std::size_t top_k = 5;
    std::uint32_t rep_threshold = 5;
    std::size_t phase_window = 5;
    double theta_setup = 0.5;
    double theta_explore = 0.5;
    std::size_t max_pattern_len = 3;
};

void add_io_flags(CLI::App* cmd, IoFlags& io, bool with_input) {
    if (with_input) {
        cmd->add_option("--in", io.input, "input log file")->required();
        cmd->add_option("--format", io.format, "input container: csv or jsonl")
            ->check(CLI::IsMember({"csv", "jsonl"}));
        cmd->add_option("--rules", io.rules_path, "rule file (default: built-in rules)");
        cmd->add_flag("--lenient{true},--strict{false}", io.lenient,
                      "skip malformed rows instead of failing (default strict)");
    }
    cmd->add_option("--out", io.out_dir, "output directory (default .)");
    cmd->add_option("--stdout", io.stdout_artifact, "also print the named artifact to stdout");
}

void add_analysis_flags(CLI::App* cmd, AnalysisFlags& flags) {
    cmd->add_option("--window", flags.window, "digest token tail length (default 20)");
    cmd->add_option("--top-k", flags.top_k, "top bigrams kept (default 5)");
    cmd->add_option("--rep-threshold", flags.rep_threshold,
                    "minimum consecutive repetitions for a trigger (default 5)")
        ->check(CLI::Range(2u, 1000000u));
    cmd->add_option("--phase-window", flags.phase_window,
                    "tokens classified for the current phase (default 5)");
    cmd->add_option("--theta-setup", flags.theta_setup, "SETUP threshold in (0,1]")
        ->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--theta-explore", flags.theta_explore, "EXPLORATION threshold in (0,1]")
        ->check(CLI::Range(1e-9, 1.0));
}

RuleSet load_rules_flag(const std::string& rules_path) {
    if (rules_path.empty()) return default_rules();
    return load_rules(read_file(rules_path));
}

// parse + normalize; the precondition of every later stage.
SessionLog load_normalized(const IoFlags& io, ParseReport* report_out = nullptr) {
    const ParseMode mode = io.lenient ? ParseMode::lenient : ParseMode::strict;
    ParseResult parsed = parse_events(read_file(io.input), io.format, mode);
    if (report_out) *report_out = parsed.report;
    return normalize(std::move(parsed.log)).log;
}

std::string parse_report_json(const ParseReport& report, std::size_t duplicates_removed) {
    nlohmann::json doc;
    doc["rows_total"] = report.rows_total;
    doc["rows_parsed"] = report.rows_parsed;
    doc["rows_skipped"] = report.rows_skipped;
    nlohmann::json by_reason = nlohmann::json::object();
    for (const auto& [reason, count] : report.skipped_by_reason) by_reason[reason] = count;
    doc["skipped_by_reason"] = by_reason;
    doc["duplicates_removed"] = duplicates_removed;
    return doc.dump(2) + "\n";
}

// Everything derived from a kept move stream; shared by graph/tokenize/
// mine/digest/run so composed stages and `run` emit identical bytes.
struct StageOutputs {
    BuildResult build;
    LayoutedGraph lg;
    GraphStats stats;
    TokenSequence tokens;
    NGramTable bigrams;
    std::vector<NGramEntry> top;
    TransitionModel model;
    std::vector<PatternTrigger> triggers;
    ContextDigest digest;
};

StageOutputs compute_stages(const std::vector<DesignMove>& moves, const AnalysisFlags& flags,
                            bool lenient) {
    StageOutputs out;
    out.build = build_graph(moves, lenient ? BuildMode::lenient : BuildMode::strict);
    out.lg = layout(out.build.graph);
    out.stats = graph_stats(out.build.graph);
    out.tokens = tokenize(moves);
    out.bigrams = count_ngrams(out.tokens, 2);
    out.top = top_ngrams(out.bigrams, flags.top_k);
    out.model = build_markov(out.tokens);
    out.triggers = detect_repetition(out.tokens, flags.max_pattern_len, flags.rep_threshold);
    DigestOptions options;
    options.tail = flags.window;
    options.top_k = flags.top_k;
    options.phase_window = flags.phase_window;
    options.theta_setup = flags.theta_setup;
    options.theta_explore = flags.theta_explore;
    out.digest = build_digest(out.build.graph, out.tokens, out.bigrams, out.model, out.triggers,
                              options);
    return out;
}

std::string tokens_txt(const TokenSequence& tokens) {
    std::string out;
    for (const auto& token : tokens.tokens) {
        out += token.text;
        out += '\n';
    }
    return out;
}

std::string graph_json_artifact(const StageOutputs& s) {
    ExportSections sections;
    sections.stats = &s.stats;
    return to_json(s.lg, sections);
}

std::string mining_json_artifact(const StageOutputs& s) {
    // Statistics document: same envelope over an empty graph so the `mine`
    // stage does not duplicate the node list.
    WorkflowGraph empty;
    empty.session_id = s.lg.graph.session_id;
    ExportSections sections;
    sections.ngrams = &s.bigrams;
    sections.top = &s.top;
    sections.transitions = &s.model;
    sections.digest = &s.digest;
    return to_json(layout(empty), sections);
}

void print_filter_summary(const FilterReport& report) {
    std::cout << "kept " << report.kept_count << " / " << report.input_count << " ("
              << format_percent(report.reduction_fraction) << " discarded)\n";
}

void print_mining_summary(const StageOutputs& s) {
    if (s.top.empty()) {
        std::cout << "top bigram: none\n";
    } else {
        std::cout << "top bigram: " << s.top.front().gram[0] << "->" << s.top.front().gram[1]
                  << " " << s.top.front().count << " (" << format_percent(s.top.front().share)
                  << ")\n";
    }
    std::cout << "phase: " << to_string(s.digest.current_phase) << "\n";
}

int cmd_ingest(const IoFlags& io) {
    ParseReport report;
    const ParseMode mode = io.lenient ? ParseMode::lenient : ParseMode::strict;
    ParseResult parsed = parse_events(read_file(io.input), io.format, mode);
    report = parsed.report;
    NormalizeResult normalized = normalize(std::move(parsed.log));

    ArtifactSet artifacts;
    artifacts.add("events.csv", to_canonical_csv(normalized.log));
    artifacts.add("ingest_report.json", parse_report_json(report, normalized.duplicates_removed));
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);
    std::cout << "parsed " << report.rows_parsed << " / " << report.rows_total << " rows ("
              << report.rows_skipped << " skipped, " << normalized.duplicates_removed
              << " duplicates)\n";
    return 0;
}

int cmd_filter(const IoFlags& io) {
    const SessionLog log = load_normalized(io);
    const FilterResult result = apply_rules(log, load_rules_flag(io.rules_path));

    ArtifactSet artifacts;
    artifacts.add("moves.csv", moves_to_csv(result.moves));
    artifacts.add("report.json", filter_report_json(result.report));
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);
    print_filter_summary(result.report);
    return 0;
}

int cmd_graph(const std::string& moves_path, const IoFlags& io, const AnalysisFlags& flags) {
    const std::vector<DesignMove> moves = moves_from_csv(read_file(moves_path));
    const StageOutputs s = compute_stages(moves, flags, io.lenient);

    ArtifactSet artifacts;
    artifacts.add("graph.json", graph_json_artifact(s));
    artifacts.add("graph.dot", to_dot(s.lg));
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);
    for (const auto& warning : s.build.warnings) std::cerr << "warning: " << warning << "\n";
    std::cout << "graph: " << s.stats.node_count << " nodes, " << s.stats.edge_count
              << " edges, max depth " << s.stats.max_depth << "\n";
    return 0;
}

int cmd_tokenize(const std::string& moves_path, const IoFlags& io) {
    const std::vector<DesignMove> moves = moves_from_csv(read_file(moves_path));
    ArtifactSet artifacts;
    artifacts.add("tokens.txt", tokens_txt(tokenize(moves)));
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);
    std::cout << moves.size() << " tokens\n";
    return 0;
}

int cmd_mine(const std::string& moves_path, const std::string& tokens_path,
             const std::string& session_id, const IoFlags& io, const AnalysisFlags& flags) {
    ArtifactSet artifacts;
    if (!moves_path.empty()) {
        const std::vector<DesignMove> moves = moves_from_csv(read_file(moves_path));
        const StageOutputs s = compute_stages(moves, flags, io.lenient);
        artifacts.add("mining.json", mining_json_artifact(s));
        artifacts.write_all(io.out_dir);
        artifacts.maybe_print(io.stdout_artifact);
        print_mining_summary(s);
        return 0;
    }
    // Bare token stream: statistics only, no graph-dependent sections.
    TokenSequence tokens;
    tokens.session_id = session_id;
    std::istringstream lines(read_file(tokens_path));
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        tokens.tokens.push_back(parse_token(line));
    }
    const NGramTable bigrams = count_ngrams(tokens, 2);
    const std::vector<NGramEntry> top = top_ngrams(bigrams, flags.top_k);
    const TransitionModel model = build_markov(tokens);
    WorkflowGraph empty;
    empty.session_id = session_id;
    ExportSections sections;
    sections.ngrams = &bigrams;
    sections.top = &top;
    sections.transitions = &model;
    artifacts.add("mining.json", to_json(layout(empty), sections));
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);
    if (top.empty())
        std::cout << "top bigram: none\n";
    else
        std::cout << "top bigram: " << top.front().gram[0] << "->" << top.front().gram[1] << " "
                  << top.front().count << " (" << format_percent(top.front().share) << ")\n";
    return 0;
}

int cmd_digest(const std::string& moves_path, const IoFlags& io, const AnalysisFlags& flags) {
    const std::vector<DesignMove> moves = moves_from_csv(read_file(moves_path));
    const StageOutputs s = compute_stages(moves, flags, io.lenient);
    ArtifactSet artifacts;
    artifacts.add("digest.txt", render_digest_text(s.digest));
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);
    return 0;
}

int cmd_export(const std::string& moves_path, const std::string& what, const IoFlags& io,
               const AnalysisFlags& flags) {
    const std::vector<DesignMove> moves = moves_from_csv(read_file(moves_path));
    const StageOutputs s = compute_stages(moves, flags, io.lenient);
    ArtifactSet artifacts;
    if (what == "dot")
        artifacts.add("graph.dot", to_dot(s.lg));
    else
        artifacts.add("graph.json", graph_json_artifact(s));
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);
    return 0;
}

int cmd_run(const IoFlags& io, const AnalysisFlags& flags) {
    const SessionLog log = load_normalized(io);
    const FilterResult filtered = apply_rules(log, load_rules_flag(io.rules_path));
    const StageOutputs s = compute_stages(filtered.moves, flags, io.lenient);

    ArtifactSet artifacts;
    artifacts.add("events.csv", to_canonical_csv(log));
    artifacts.add("moves.csv", moves_to_csv(filtered.moves));
    artifacts.add("report.json", filter_report_json(filtered.report));
    artifacts.add("graph.json", graph_json_artifact(s));
    artifacts.add("graph.dot", to_dot(s.lg));
    artifacts.add("tokens.txt", tokens_txt(s.tokens));
    artifacts.add("mining.json", mining_json_artifact(s));
    artifacts.add("digest.txt", render_digest_text(s.digest));
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);

    for (const auto& warning : s.build.warnings) std::cerr << "warning: " << warning << "\n";
    print_filter_summary(filtered.report);
    print_mining_summary(s);
    std::cout << "wrote " << artifacts.size() << " artifacts to " << io.out_dir << "\n";
    return 0;
}

int cmd_synth(const std::string& fixture, std::uint64_t seed, std::uint32_t roots,
              std::uint32_t branch_lo, std::uint32_t branch_hi, std::uint32_t depth_lo,
              std::uint32_t depth_hi, double noise_ratio, std::uint32_t max_moves,
              const IoFlags& io) {
    std::map<std::string, Corpus> corpora;
    if (!fixture.empty()) {
        std::map<std::string, Corpus> all = paper_fixtures();
        if (fixture == "all") {
            corpora = std::move(all);
        } else {
            const auto it = all.find(fixture);
            if (it == all.end())
                throw UsageError("unknown fixture \"" + fixture +
                                 "\" (pilot_927, pilot_bigrams, pilot_transitions, "
                                 "figure1_like, all)");
            corpora.emplace(it->first, std::move(it->second));
        }
    } else {
        ScenarioSpec spec;
        spec.seed = seed;
        spec.n_roots = roots;
        spec.branch_factor = {branch_lo, branch_hi};
        spec.chain_depth = {depth_lo, depth_hi};
        spec.noise_ratio = noise_ratio;
        spec.max_signal_moves = max_moves;
        corpora.emplace("scenario_" + std::to_string(seed), generate(spec));
    }

    ArtifactSet artifacts;
    for (const auto& [name, corpus] : corpora) {
        artifacts.add(name + ".csv", to_canonical_csv(corpus.log));
        artifacts.add(name + ".jsonl", to_canonical_jsonl(corpus.log));
        artifacts.add(name + ".ground_truth.json", ground_truth_json(corpus.truth));
    }
    artifacts.write_all(io.out_dir);
    artifacts.maybe_print(io.stdout_artifact);
    for (const auto& [name, corpus] : corpora)
        std::cout << name << ": " << corpus.log.events.size() << " events, "
                  << corpus.truth.moves.size() << " moves\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"workflow reconstruction from node-editor event logs"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);

    IoFlags io;
    AnalysisFlags flags;
    std::string moves_path, tokens_path, session_id, export_what = "dot", fixture;
    std::uint64_t seed = 42;
    std::uint32_t roots = 1, branch_lo = 1, branch_hi = 3, depth_lo = 1, depth_hi = 4;
    double noise_ratio = 0.3;
    std::uint32_t max_moves = 120;

    CLI::App* ingest = app.add_subcommand("ingest", "parse + normalize to canonical CSV");
    add_io_flags(ingest, io, true);

    CLI::App* filter = app.add_subcommand("filter", "classify events into design moves");
    add_io_flags(filter, io, true);

    CLI::App* graph = app.add_subcommand("graph", "build the lineage graph from moves.csv");
    graph->add_option("--moves", moves_path, "moves.csv from the filter stage")->required();
    add_io_flags(graph, io, false);

    CLI::App* tokenize = app.add_subcommand("tokenize", "emit the behavioral token stream");
    tokenize->add_option("--moves", moves_path, "moves.csv from the filter stage")->required();
    add_io_flags(tokenize, io, false);

    CLI::App* mine = app.add_subcommand("mine", "n-gram and Markov statistics");
    mine->add_option("--moves", moves_path, "moves.csv from the filter stage");
    mine->add_option("--tokens", tokens_path, "bare token stream (one token per line)");
    mine->add_option("--session", session_id, "session id for --tokens input");
    add_io_flags(mine, io, false);
    add_analysis_flags(mine, flags);

    CLI::App* digest = app.add_subcommand("digest", "agent-ready workflow digest");
    digest->add_option("--moves", moves_path, "moves.csv from the filter stage")->required();
    add_io_flags(digest, io, false);
    add_analysis_flags(digest, flags);

    CLI::App* exp = app.add_subcommand("export", "re-export graph.dot or graph.json");
    exp->add_option("--moves", moves_path, "moves.csv from the filter stage")->required();
    exp->add_option("--what", export_what, "dot or json")
        ->check(CLI::IsMember({"dot", "json"}));
    add_io_flags(exp, io, false);

    CLI::App* synth = app.add_subcommand("synth", "generate synthetic corpora + ground truth");
    synth->add_option("--fixture", fixture,
                      "pilot_927 | pilot_bigrams | pilot_transitions | figure1_like | all");
    synth->add_option("--seed", seed, "scenario seed (default 42)");
    synth->add_option("--roots", roots, "root nodes (default 1)");
    synth->add_option("--branch-min", branch_lo, "min children per expansion");
    synth->add_option("--branch-max", branch_hi, "max children per expansion");
    synth->add_option("--depth-min", depth_lo, "min target depth per root");
    synth->add_option("--depth-max", depth_hi, "max target depth per root");
    synth->add_option("--noise-ratio", noise_ratio, "noise fraction of the log (default 0.3)");
    synth->add_option("--max-moves", max_moves, "cap on kept moves (default 120)");
    add_io_flags(synth, io, false);

    CLI::App* run = app.add_subcommand("run", "full pipeline: all artifacts in one pass");
    add_io_flags(run, io, true);
    add_analysis_flags(run, flags);

    CLI::App* rules = app.add_subcommand("rules", "rule-set utilities");
    CLI::App* rules_dump = rules->add_subcommand("dump", "print the active rule set");
    rules_dump->add_option("--rules", io.rules_path, "rule file (default: built-in rules)");
    rules->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(ingest)) return cmd_ingest(io);
        if (app.got_subcommand(filter)) return cmd_filter(io);
        if (app.got_subcommand(graph)) return cmd_graph(moves_path, io, flags);
        if (app.got_subcommand(tokenize)) return cmd_tokenize(moves_path, io);
        if (app.got_subcommand(mine)) {
            if (moves_path.empty() && tokens_path.empty())
                throw UsageError("mine needs --moves or --tokens");
            return cmd_mine(moves_path, tokens_path, session_id, io, flags);
        }
        if (app.got_subcommand(digest)) return cmd_digest(moves_path, io, flags);
        if (app.got_subcommand(exp)) return cmd_export(moves_path, export_what, io, flags);
        if (app.got_subcommand(synth))
            return cmd_synth(fixture, seed, roots, branch_lo, branch_hi, depth_lo, depth_hi,
                             noise_ratio, max_moves, io);
        if (app.got_subcommand(run)) return cmd_run(io, flags);
        if (app.got_subcommand(rules)) {
            if (io.rules_path.empty()) {
                std::cout << default_rules_text();
            } else {
                load_rules(read_file(io.rules_path));  // validate before echoing
                std::cout << read_file(io.rules_path);
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.family());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
