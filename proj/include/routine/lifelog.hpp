#pragma once

#include <compare>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace routine {

struct ObjectDetection {
    std::string label;
    double confidence = 0.0; // in [0, 1]
};

// One labelled image event from a concept log.
struct ConceptRecord {
    std::string user_id;
    std::string day; // ISO date "YYYY-MM-DD"
    int minute_of_day = 0; // 0..1439
    std::string scene;
    std::string activity;
    std::vector<ObjectDetection> objects;
};

// Key of a time-slot node: (day index, slot index). Row-major ordering
// by (day, slot) is the canonical node order used by every module.
struct NodeKey {
    int day = 0;
    int slot = 0;
    auto operator<=>(const NodeKey&) const = default;
};

// Summary of one occupied time-slot: modal scene/activity plus the
// objects seen often enough to be representative of the slot.
struct TimeSlotNode {
    int day_index = 0;
    int slot_index = 0;
    std::string scene;
    std::string activity;
    std::vector<std::string> objects; // sorted, unique
    int image_count = 0;
    // earliest/latest image timestamps in the slot, minute of day;
    // consumed by the representativeness score
    int first_minute = 0;
    int last_minute = 0;

    NodeKey key() const { return NodeKey{day_index, slot_index}; }
};

struct NodeGrid {
    std::string user_id;
    int slot_minutes = 30;
    std::vector<std::string> days; // chronological ISO dates
    std::map<NodeKey, TimeSlotNode> nodes; // ordered => row-major iteration

    int slots_per_day() const { return 1440 / slot_minutes; }
    int n_days() const { return static_cast<int>(days.size()); }

    // Node keys in row-major order.
    std::vector<NodeKey> keys() const;
};

struct IngestConfig {
    int slot_minutes = 30;        // must divide 1440
    int min_images_per_slot = 1;  // slots below this produce no node
    int object_min_count = 10;    // object kept when seen in > this many images
    double object_conf_min = 0.5; // detections at or below are ignored
    double frq = 0.5;             // camera frame rate, frames per minute
};

struct MalformedRecord : std::runtime_error {
    MalformedRecord(std::size_t line_no, const std::string& reason)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + reason),
          line(line_no) {}
    std::size_t line;
};

struct EmptyInput : std::runtime_error {
    EmptyInput() : std::runtime_error("input contains no records") {}
};

struct NoNodes : std::runtime_error {
    NoNodes() : std::runtime_error("no slot reaches min_images_per_slot") {}
};

// Parses a line-delimited concept log (one JSON record per line).
// Records come back in input order; a bad line throws MalformedRecord
// rather than being skipped. Whitespace-only lines are ignored.
std::vector<ConceptRecord> parse_concept_log(std::istream& in);

// Buckets records into (day, slot) cells and summarizes each cell with
// at least cfg.min_images_per_slot records into a TimeSlotNode.
// Scene/activity are the modal labels (ties to the lexicographically
// smallest, which makes the result independent of record order).
// An object label is kept when it was detected with confidence
// > cfg.object_conf_min in strictly more than cfg.object_min_count
// distinct images of the slot.
NodeGrid build_nodes(const std::vector<ConceptRecord>& records, const IngestConfig& cfg);

} // namespace routine
