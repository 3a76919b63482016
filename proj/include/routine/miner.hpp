#pragma once

#include "routine/mds.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>

namespace routine {

struct MinerConfig {
    // growth stops before an addition would push the variance past this cap
    double variance_cap = std::numeric_limits<double>::infinity();
    double sigma = 3.0;                // Gaussian smoothing width, trace samples
    std::optional<double> threshold;   // first-derivative threshold; nullopt = sweep
    double sweep_lo = 0.0;
    double sweep_hi = 0.05;
    double sweep_step = 0.002;
    int min_pattern_nodes = 2;
    int min_pattern_days = 2;
    int max_patterns = 0; // 0 = unbounded
};

// Aggregation record of one growth run. order[0], order[1] are the seed;
// v[0] is the seed distance, v[t] for t >= 1 the cluster variance after
// the t-th addition, so v.size() == order.size() - 1.
struct VarianceTrace {
    std::vector<NodeKey> order;
    std::vector<double> v;
};

struct PatternLabels {
    std::string scene;    // modal over pattern nodes
    std::string activity; // modal over pattern nodes
    std::vector<std::pair<std::string, int>> objects; // label -> node count
};

struct Pattern {
    int id = 0;
    std::vector<NodeKey> nodes; // row-major sorted
    std::pair<NodeKey, NodeKey> seed;
    double threshold_used = 0.0;
    // index into the variance trace where the pattern was cut; -1 when the
    // whole trace was accepted
    int cut_index = -1;
    PatternLabels labels;

    int distinct_days() const;
};

struct PatternSet {
    std::vector<Pattern> patterns;
    std::vector<NodeKey> unassigned; // row-major sorted
};

struct NoSeed : std::runtime_error {
    NoSeed() : std::runtime_error("no slot column holds two available nodes") {}
};

struct EmptySet : std::runtime_error {
    EmptySet() : std::runtime_error("variance of an empty point set") {}
};

struct TraceTooShort : std::runtime_error {
    explicit TraceTooShort(std::size_t n)
        : std::runtime_error("variance trace of length " + std::to_string(n) +
                             " is too short to differentiate") {}
};

// Scores a cut candidate: pattern-so-far vs. the rest of the available
// nodes. Provided by the scoring module (two-cluster silhouette plus
// representativeness); injected to keep the miner free of a scoring
// dependency cycle.
using CutScorer =
    std::function<double(std::span<const NodeKey> pattern, std::span<const NodeKey> rest)>;

// Cheapest same-slot pair among available nodes: the non-excluded pair
// with equal slot_index minimising node distance. Ties go to the smallest
// (day of first, day of second, slot). Pairs listed in `banned` are
// skipped (used by mine for seeds whose pattern failed the size gates).
std::pair<NodeKey, NodeKey> find_seed(
    const NodeGrid& grid, const DistanceMatrix& D, const std::set<NodeKey>& excluded,
    const std::set<std::pair<NodeKey, NodeKey>>& banned = {});

// All non-excluded nodes outside P within one slot column of P (any day).
std::set<NodeKey> neighbours(const std::set<NodeKey>& P, const NodeGrid& grid,
                             const std::set<NodeKey>& excluded);

// Sum of per-axis population variances (trace of the population
// covariance). Accumulated with Welford's recurrence in list order; grow
// reproduces the identical arithmetic incrementally, so the two paths
// agree bit for bit. Throws EmptySet on no points.
double cluster_variance(std::span<const std::pair<double, double>> points);

// Greedy aggregation from a seed pair: repeatedly admit the neighbour
// whose inclusion yields the smallest cluster variance in the embedding.
// Ties break on the smaller node distance to the seed (min over the two
// seed nodes), then on (day, slot). Growth stops when no neighbours
// remain or when the best admission would exceed cfg.variance_cap.
VarianceTrace grow(const std::pair<NodeKey, NodeKey>& seed, const NodeGrid& grid,
                   const Embedding& embedding, const MinerConfig& cfg,
                   const std::set<NodeKey>& excluded);

// Cut candidates on a variance trace: smooth v (the seed-distance entry
// v[0] is excluded, being in distance rather than variance units), take
// first/second central differences, and report each index where the
// curvature peaks above the noise floor, decays back to zero nearby, and
// the slope exceeds T. Returned indices point into trace.v, ascending.
// Throws TraceTooShort when v has fewer than 3 entries.
std::vector<int> detect_cut(const VarianceTrace& trace, double sigma, double T);

// Full mining loop: seed, grow, cut, score, extract, repeat until no
// seeds remain (or max_patterns). cfg.threshold must be resolved to a
// number (run scoring::sweep_threshold first when sweeping).
PatternSet mine(const NodeGrid& grid, const DistanceMatrix& D, const Embedding& embedding,
                const MinerConfig& cfg, const CutScorer& scorer);

// Modal scene/activity and per-node object frequencies of a node set.
PatternLabels summarize_labels(const NodeGrid& grid, std::span<const NodeKey> nodes);

} // namespace routine
