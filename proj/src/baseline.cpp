#include "routine/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace routine {

FeatureVocab build_vocab(const NodeGrid& grid) {
    std::set<std::string> scenes, activities, objects;
    for (const auto& [key, node] : grid.nodes) {
        scenes.insert(node.scene);
        activities.insert(node.activity);
        objects.insert(node.objects.begin(), node.objects.end());
    }
    FeatureVocab vocab;
    vocab.scenes.assign(scenes.begin(), scenes.end());
    vocab.activities.assign(activities.begin(), activities.end());
    vocab.objects.assign(objects.begin(), objects.end());
    return vocab;
}

namespace {

std::size_t index_in(const std::vector<std::string>& vocab, const std::string& label) {
    const auto it = std::lower_bound(vocab.begin(), vocab.end(), label);
    if (it == vocab.end() || *it != label) throw UnknownLabel(label);
    return static_cast<std::size_t>(it - vocab.begin());
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

// union-find over core points
struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

std::vector<double> featurize(const TimeSlotNode& node, const FeatureVocab& vocab,
                              double time_weight, int slots_per_day) {
    std::vector<double> out(vocab.dimension(), 0.0);
    out[index_in(vocab.scenes, node.scene)] = 1.0;
    out[vocab.scenes.size() + index_in(vocab.activities, node.activity)] = 1.0;
    if (!node.objects.empty()) {
        const double weight = 1.0 / static_cast<double>(node.objects.size());
        const std::size_t base = vocab.scenes.size() + vocab.activities.size();
        for (const auto& label : node.objects) out[base + index_in(vocab.objects, label)] = weight;
    }
    out.back() = time_weight * (static_cast<double>(node.slot_index) /
                                static_cast<double>(slots_per_day));
    return out;
}

std::vector<int> dbscan(const std::vector<std::vector<double>>& points, double eps, int min_pts) {
    if (points.empty()) throw std::invalid_argument("dbscan needs at least one point");
    if (!(eps > 0.0) || min_pts < 1) throw std::invalid_argument("bad dbscan parameters");
    const int n = static_cast<int>(points.size());
    const double eps_sq = eps * eps;

    std::vector<std::vector<int>> in_range(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (squared_distance(points[i], points[j]) <= eps_sq) in_range[i].push_back(j);
        }
    }

    std::vector<char> core(n, 0);
    for (int i = 0; i < n; ++i) core[i] = in_range[i].size() >= static_cast<std::size_t>(min_pts);

    DisjointSet components(n);
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        for (int j : in_range[i]) {
            if (core[j]) components.unite(i, j);
        }
    }

    std::vector<int> labels(n, -1);
    int next_label = 0;
    std::vector<int> component_label(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        const int root = components.find(i);
        if (component_label[root] < 0) component_label[root] = next_label++;
        labels[i] = component_label[root];
    }

    // border point: non-core within eps of some core; nearest core wins
    // (distance ties to the smaller cluster label)
    for (int i = 0; i < n; ++i) {
        if (core[i]) continue;
        double best_d = 0.0;
        int best_label = -1;
        for (int j : in_range[i]) {
            if (!core[j]) continue;
            const double d = squared_distance(points[i], points[j]);
            const int label = labels[j];
            if (best_label < 0 || d < best_d || (d == best_d && label < best_label)) {
                best_d = d;
                best_label = label;
            }
        }
        labels[i] = best_label;
    }
    return labels;
}

PatternSet baseline_patterns(const NodeGrid& grid, const BaselineConfig& cfg) {
    if (grid.nodes.empty()) throw std::invalid_argument("empty grid");
    const FeatureVocab vocab = build_vocab(grid);
    const std::vector<NodeKey> keys = grid.keys();

    std::vector<std::vector<double>> features;
    features.reserve(keys.size());
    for (const auto& key : keys) {
        features.push_back(
            featurize(grid.nodes.at(key), vocab, cfg.time_weight, grid.slots_per_day()));
    }

    const std::vector<int> labels = dbscan(features, cfg.eps, cfg.min_pts);

    PatternSet result;
    const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    for (int c = 0; c < n_clusters; ++c) {
        Pattern pattern;
        pattern.id = c;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (labels[i] == c) pattern.nodes.push_back(keys[i]);
        }
        pattern.seed = {pattern.nodes.front(),
                        pattern.nodes.size() > 1 ? pattern.nodes[1] : pattern.nodes.front()};
        pattern.threshold_used = cfg.eps;
        pattern.cut_index = -1;
        pattern.labels = summarize_labels(grid, pattern.nodes);
        result.patterns.push_back(std::move(pattern));
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (labels[i] < 0) result.unassigned.push_back(keys[i]);
    }
    return result;
}

} // namespace routine
