#pragma once

#include "routine/miner.hpp"

#include <cstdint>
#include <map>

namespace routine {

struct InvalidSpec : std::runtime_error {
    explicit InvalidSpec(const std::string& what) : std::runtime_error(what) {}
};

// One planted behavioural pattern: a rectangle of slots on a subset of
// days, emitted with fixed template labels (subject to label noise).
struct PlantedPattern {
    int slot_lo = 0;
    int slot_hi = 0;        // inclusive
    std::vector<int> days;  // day indices carrying the pattern
    std::string scene;
    std::string activity;
    std::vector<std::string> objects;
    int images_per_slot = 12;
};

struct SynthSpec {
    std::string user_id = "synth";
    std::string base_date = "2024-03-04";
    int n_days = 10;
    int slots_per_day = 48;
    int slot_minutes = 30;
    double frq = 0.5; // frames per minute; fixes in-slot timestamp spacing
    std::vector<PlantedPattern> planted;
    // background texture
    std::vector<std::string> background_scenes;
    std::vector<std::string> background_activities;
    std::vector<std::string> background_objects;
    double background_density = 0.3; // chance an empty cell gets records
    int background_images_per_slot = 12;
    int background_objects_per_slot = 3; // object labels shared by a slot's images
    // 0: every background slot draws fresh random labels; K > 0: background
    // slots are drawn from K recurring context templates (recurring but
    // unplanted behaviour, the realistic texture of a lifelog)
    int background_contexts = 0;
    double noise_rate = 0.0; // per-label replacement probability in planted cells
    std::uint64_t seed = 1;
};

// Node-level ground truth: planted pattern index per cell, -1 background.
struct GroundTruth {
    int n_days = 0;
    int slots_per_day = 0;
    std::map<NodeKey, int> assignments;
};

struct SynthResult {
    std::vector<ConceptRecord> records;
    GroundTruth truth;
};

// Deterministic generator (splitmix64-driven): the same spec and seed
// produce byte-identical records on any platform. Every day receives at
// least one occupied slot so ground-truth day indices always agree with
// build_nodes' chronological day indexing.
SynthResult generate(const SynthSpec& spec);

struct PatternMatch {
    int planted_id = -1;
    int found_id = -1; // -1 when nothing matched
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    std::vector<PatternMatch> per_planted;
    double macro_f1 = 0.0;
};

// Node-level precision/recall/F1 of discovered patterns against the
// planted ones. Planted-found pairs are matched greedily by descending
// node overlap (ties to the lower found id); each found pattern is used
// at most once.
EvalReport evaluate(const PatternSet& found, const GroundTruth& truth);

} // namespace routine
