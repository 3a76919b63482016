#pragma once

#include "routine/miner.hpp"

namespace routine {

struct BaselineConfig {
    double eps = 0.5;
    int min_pts = 3;
    double time_weight = 1.0;
};

struct UnknownLabel : std::runtime_error {
    explicit UnknownLabel(const std::string& label)
        : std::runtime_error("label '" + label + "' not in vocabulary") {}
};

// Ordered label vocabularies of one grid; feature layout is
// [scene one-hot | activity one-hot | object multi-hot | time].
struct FeatureVocab {
    std::vector<std::string> scenes;
    std::vector<std::string> activities;
    std::vector<std::string> objects;

    std::size_t dimension() const {
        return scenes.size() + activities.size() + objects.size() + 1;
    }
};

FeatureVocab build_vocab(const NodeGrid& grid);

// Dense descriptor of one node: scene/activity one-hots, object
// multi-hot normalised to unit sum (all zeros when the node has no
// objects), and the weighted normalised slot time as the last component.
std::vector<double> featurize(const TimeSlotNode& node, const FeatureVocab& vocab,
                              double time_weight, int slots_per_day);

// Density clustering under Euclidean distance. Labels are cluster ids
// starting at 0 in order of first appearance; -1 marks noise. A point is
// core when at least min_pts points (itself included) lie within eps.
// Border points join the cluster of their nearest core point, which
// makes the partition independent of input order.
std::vector<int> dbscan(const std::vector<std::vector<double>>& points, double eps, int min_pts);

// The comparison pipeline: featurize every node, cluster with dbscan,
// and map each non-noise cluster to a Pattern. Noise goes to unassigned.
PatternSet baseline_patterns(const NodeGrid& grid, const BaselineConfig& cfg);

} // namespace routine
