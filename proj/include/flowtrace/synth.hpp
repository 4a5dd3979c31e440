#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "flowtrace/filter.hpp"
#include "flowtrace/graph.hpp"
#include "flowtrace/token.hpp"

namespace flowtrace {

struct CountRange {
    std::uint32_t lo = 1;
    std::uint32_t hi = 1;
};

// Parameters for one synthetic session. Proportion maps must sum to 1 within
// 1e-9 and ranges must be non-empty (lo <= hi).
struct ScenarioSpec {
    std::uint64_t seed = 0;
    std::uint32_t n_roots = 1;
    CountRange branch_factor{1, 2};  // children added per expansion step
    CountRange chain_depth{1, 3};    // target depth per root
    double noise_ratio = 0.0;        // discardable events / total events
    std::map<MoveKind, double> move_mix{
        {MoveKind::insert, 0.2},
        {MoveKind::modify, 0.35},
        {MoveKind::generation, 0.35},
        {MoveKind::remove, 0.1},
    };
    std::map<std::string, double> kinds_mix{
        {"prompt", 0.2},
        {"image", 0.6},
        {"video", 0.2},
    };
    std::uint32_t max_signal_moves = 160;  // hard cap on kept moves
};

// Everything the pipeline must reconstruct from the generated log.
struct GroundTruth {
    WorkflowGraph graph;
    std::vector<DesignMove> moves;
    FilterReport report;
    TokenSequence tokens;
};

struct Corpus {
    SessionLog log;
    GroundTruth truth;
};

// Deterministic: the same spec yields a byte-identical log. Noise events
// match only DISCARD rules of the default rule set; signal events match
// exactly one KEEP rule. Throws ValidationError on invalid specs.
Corpus generate(const ScenarioSpec& spec);

// Named corpora reproducing published pilot aggregates plus a branching
// multi-kind layout scenario:
//   pilot_927         927 events, exactly 563 kept by the default rules
//   pilot_bigrams     195 tokens; top bigram GENERATION_image x2, 37 of 194
//   pilot_transitions same stream; 16/23 INSERT_image->MODIFY_image and
//                     37/56 GENERATION_image->GENERATION_image outgoing
//   figure1_like      prompt/image/video session with branches and removals
std::map<std::string, Corpus> paper_fixtures();

// Ground truth in the structured-document format of the graph exporter,
// extended with "moves", "report" and "tokens" sections.
std::string ground_truth_json(const GroundTruth& truth);

}  // namespace flowtrace
