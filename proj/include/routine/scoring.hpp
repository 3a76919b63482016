#pragma once

#include "routine/miner.hpp"

namespace routine {

struct SingleCluster : std::runtime_error {
    SingleCluster() : std::runtime_error("silhouette needs at least two clusters") {}
};

struct NoPatterns : std::runtime_error {
    NoPatterns() : std::runtime_error("representativeness needs at least one pattern") {}
};

struct SilhouetteResult {
    std::vector<double> values; // aligned with D, 0 where unlabelled
    std::vector<char> labelled; // aligned with D
    double mean = 0.0;          // over labelled nodes
};

// Per-node silhouette over the semantic distance matrix.
// labels[i] is the cluster id of node i, negative for unlabelled nodes
// (excluded from a/b computations and from the mean). Singleton clusters
// score 0 by convention, as does the degenerate a == b == 0 case.
// Throws SingleCluster when fewer than two clusters are populated.
SilhouetteResult silhouette(const DistanceMatrix& D, const std::vector<int>& labels);

// Representativeness of one node set: day coverage fraction plus the
// image-count ratio against the larger of one hour's worth of frames and
// the expected frame count over the pattern's per-day time spans.
double representativeness_term(const NodeGrid& grid, std::span<const NodeKey> nodes, double frq);

// Mean representativeness over the pattern set; throws NoPatterns.
double t_rpr(const PatternSet& patterns, const NodeGrid& grid, double frq);

// Combined pattern-set score.
inline double sc(double sl, double t_rpr_value) { return sl + t_rpr_value; }

// Cut-candidate scorer for the miner: two-cluster silhouette (pattern
// so far vs. remaining available nodes) plus the candidate pattern's
// representativeness term.
CutScorer make_cut_scorer(const NodeGrid& grid, const DistanceMatrix& D, double frq);

struct ScoreReport {
    double global_silhouette = 0.0; // all patterns as clusters; 0 when < 2 patterns
    std::vector<std::pair<int, double>> per_pattern_silhouette; // (pattern id, mean)
    double t_rpr = 0.0; // 0 when the set is empty
    double sc = 0.0;    // global_silhouette + t_rpr
    std::vector<std::pair<double, double>> sweep; // (T, sc) when a sweep ran
    double threshold_used = 0.0;
};

// Scores a finished pattern set: silhouette with one cluster per pattern
// (unassigned nodes excluded) and mean representativeness.
ScoreReport score_pattern_set(const NodeGrid& grid, const DistanceMatrix& D,
                              const PatternSet& ps, double frq);

struct SweepResult {
    double best_threshold = 0.0; // argmax sc, ties to the smallest T
    std::vector<std::pair<double, double>> table; // (T, sc), ascending T
};

// Runs the full miner at every threshold in [cfg.sweep_lo, cfg.sweep_hi]
// spaced cfg.sweep_step apart and scores each resulting pattern set.
SweepResult sweep_threshold(const NodeGrid& grid, const DistanceMatrix& D,
                            const Embedding& embedding, const MinerConfig& cfg, double frq);

} // namespace routine
