#pragma once

#include "routine/lifelog.hpp"

#include <span>
#include <vector>

namespace routine {

struct TooFewNodes : std::runtime_error {
    explicit TooFewNodes(const std::string& what) : std::runtime_error(what) {}
};

// Symmetric all-pairs node dissimilarity, rows/cols in row-major
// (day, slot) order. Entries lie in [0, 3].
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::vector<NodeKey> keys, std::vector<double> values)
        : keys_(std::move(keys)), values_(std::move(values)) {}

    int size() const { return static_cast<int>(keys_.size()); }
    const std::vector<NodeKey>& keys() const { return keys_; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * keys_.size() + j]; }

private:
    std::vector<NodeKey> keys_;
    std::vector<double> values_; // dense row-major, n*n
};

// Jaccard distance between two sorted unique label sets.
// Conventions: d(empty, empty) = 0, d(empty, non-empty) = 1.
double jaccard_distance(std::span<const std::string> a, std::span<const std::string> b);

// Node dissimilarity: binary scene term + binary activity term +
// Jaccard distance of the object sets. Range [0, 3].
double node_distance(const TimeSlotNode& a, const TimeSlotNode& b);

// All-pairs matrix over the grid's nodes; throws TooFewNodes below 2.
DistanceMatrix distance_matrix(const NodeGrid& grid);

} // namespace routine
