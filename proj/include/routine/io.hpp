#pragma once

#include "routine/baseline.hpp"
#include "routine/scoring.hpp"
#include "routine/synth.hpp"

#include <filesystem>
#include <ostream>

namespace routine {

inline constexpr const char* kProjectVersion = "0.1.0";

// ---- concept logs -------------------------------------------------------

void write_concept_log(std::ostream& out, const std::vector<ConceptRecord>& records);

// One flat JSON record per node: day_index, slot_index, scene, activity,
// objects[], image_count.
void write_node_grid(std::ostream& out, const NodeGrid& grid);

// ---- pattern sets -------------------------------------------------------

struct GridMeta {
    std::string user_id;
    int n_days = 0;
    int slots_per_day = 48;
    int slot_minutes = 30;
};

GridMeta grid_meta(const NodeGrid& grid);

// Serialised pattern set, including grid extent so that timeline and
// histogram reports can run from the file alone.
std::string pattern_set_json(const PatternSet& ps, const GridMeta& meta,
                             const std::string& method);

struct LoadedPatternSet {
    PatternSet set;
    GridMeta meta;
    std::string method;
};

LoadedPatternSet load_pattern_set(const std::filesystem::path& path);

// ---- scores, ground truth, eval, synth specs ----------------------------

std::string score_report_json(const ScoreReport& report);
std::string ground_truth_json(const GroundTruth& truth);
GroundTruth load_ground_truth(const std::filesystem::path& path);
std::string eval_report_json(const EvalReport& report);
SynthSpec load_synth_spec(const std::filesystem::path& path);

// ---- CSV dumps ----------------------------------------------------------

void write_distance_csv(std::ostream& out, const DistanceMatrix& D);
void write_coords_csv(std::ostream& out, const Embedding& embedding);
void write_sweep_csv(std::ostream& out, const std::vector<std::pair<double, double>>& table);
// per pattern: number of days it appears on
void write_histogram_csv(std::ostream& out, const PatternSet& ps);

// ---- SVG reports --------------------------------------------------------

// Grid mosaic: rows are days, columns are slots, cells coloured by
// pattern id (fixed palette, id mod palette size); unassigned and
// missing cells stay blank. Byte-stable for identical inputs.
std::string timeline_svg(const PatternSet& ps, const GridMeta& meta);

// Bar chart of days-of-occurrence per pattern.
std::string histogram_svg(const PatternSet& ps);

// ---- run manifest -------------------------------------------------------

class RunManifest {
public:
    explicit RunManifest(std::string command) : command_(std::move(command)) {}

    void add_input(const std::string& path) { inputs_.push_back(path); }
    void add_output(const std::string& path) { outputs_.push_back(path); }
    void set_config(const std::string& key, const std::string& value);
    void set_config(const std::string& key, double value);
    void set_config(const std::string& key, int value);
    void set_timing(const std::string& stage, double milliseconds);

    std::string to_json() const;

private:
    std::string command_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::vector<std::pair<std::string, std::string>> config_;
    std::vector<std::pair<std::string, double>> timings_;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace routine
