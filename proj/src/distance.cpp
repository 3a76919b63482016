#include "routine/distance.hpp"

namespace routine {

double jaccard_distance(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() && b.empty()) return 0.0;
    // both inputs sorted and unique; single merge pass
    std::size_t i = 0, j = 0, both = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++both;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const double unions = static_cast<double>(a.size() + b.size() - both);
    return 1.0 - static_cast<double>(both) / unions;
}

double node_distance(const TimeSlotNode& a, const TimeSlotNode& b) {
    const double scene_term = a.scene == b.scene ? 0.0 : 1.0;
    const double activity_term = a.activity == b.activity ? 0.0 : 1.0;
    return scene_term + activity_term + jaccard_distance(a.objects, b.objects);
}

DistanceMatrix distance_matrix(const NodeGrid& grid) {
    const int n = static_cast<int>(grid.nodes.size());
    if (n < 2) throw TooFewNodes("distance matrix needs >= 2 nodes, got " + std::to_string(n));

    std::vector<NodeKey> keys = grid.keys();
    std::vector<const TimeSlotNode*> nodes;
    nodes.reserve(keys.size());
    for (const auto& key : keys) nodes.push_back(&grid.nodes.at(key));

    std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = node_distance(*nodes[i], *nodes[j]);
            values[static_cast<std::size_t>(i) * n + j] = d;
            values[static_cast<std::size_t>(j) * n + i] = d;
        }
    }
    return DistanceMatrix(std::move(keys), std::move(values));
}

} // namespace routine
