#include "routine/miner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace routine {

namespace {

// Welford accumulator over 2D points. variance_with() evaluates a
// hypothetical addition with exactly the arithmetic add() would perform,
// which keeps grow's incremental values identical to cluster_variance()
// re-run from scratch over the same point order.
struct RunningVariance {
    long n = 0;
    double mean_x = 0.0, mean_y = 0.0;
    double m2_x = 0.0, m2_y = 0.0;

    void add(double x, double y) {
        ++n;
        const double dx = x - mean_x;
        mean_x += dx / static_cast<double>(n);
        m2_x += dx * (x - mean_x);
        const double dy = y - mean_y;
        mean_y += dy / static_cast<double>(n);
        m2_y += dy * (y - mean_y);
    }

    double variance() const {
        return n == 0 ? 0.0 : (m2_x + m2_y) / static_cast<double>(n);
    }

    double variance_with(double x, double y) const {
        const double n1 = static_cast<double>(n + 1);
        const double dx = x - mean_x;
        const double mx = mean_x + dx / n1;
        const double m2x = m2_x + dx * (x - mx);
        const double dy = y - mean_y;
        const double my = mean_y + dy / n1;
        const double m2y = m2_y + dy * (y - my);
        (void)my;
        return (m2x + m2y) / n1;
    }
};

// Gaussian kernel truncated at 4*sigma. Boundaries are padded by odd
// (point-symmetric) reflection through the end samples, which extends a
// linear trend exactly and so adds no spurious curvature at the ends.
std::vector<double> gaussian_smooth(std::span<const double> signal, double sigma) {
    const int n = static_cast<int>(signal.size());
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int j = -radius; j <= radius; ++j) {
        kernel[j + radius] = std::exp(-0.5 * (j / sigma) * (j / sigma));
        sum += kernel[j + radius];
    }
    for (double& k : kernel) k /= sum;

    // value at a virtual index, folding odd reflections until in range
    auto sample = [&](int idx) {
        double offset = 0.0;
        double sign = 1.0;
        while (idx < 0 || idx >= n) {
            if (idx < 0) {
                offset += sign * 2.0 * signal[0];
                sign = -sign;
                idx = -idx;
            } else {
                offset += sign * 2.0 * signal[n - 1];
                sign = -sign;
                idx = 2 * (n - 1) - idx;
            }
        }
        return offset + sign * signal[idx];
    };

    std::vector<double> out(signal.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = -radius; j <= radius; ++j) {
            acc += kernel[j + radius] * sample(i + j);
        }
        out[i] = acc;
    }
    return out;
}

std::pair<NodeKey, NodeKey> normalize_pair(NodeKey a, NodeKey b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

} // namespace

int Pattern::distinct_days() const {
    std::set<int> days;
    for (const auto& key : nodes) days.insert(key.day);
    return static_cast<int>(days.size());
}

std::pair<NodeKey, NodeKey> find_seed(const NodeGrid& grid, const DistanceMatrix& D,
                                      const std::set<NodeKey>& excluded,
                                      const std::set<std::pair<NodeKey, NodeKey>>& banned) {
    std::unordered_map<int, int> index_of_day_slot; // packed key -> matrix index
    const auto& keys = D.keys();
    auto pack = [](const NodeKey& k) { return k.day * 10000 + k.slot; };
    for (int i = 0; i < static_cast<int>(keys.size()); ++i) index_of_day_slot[pack(keys[i])] = i;

    // available nodes grouped by slot column, day-ascending within a column
    std::map<int, std::vector<NodeKey>> columns;
    for (const auto& [key, node] : grid.nodes) {
        if (!excluded.contains(key)) columns[key.slot].push_back(key);
    }

    bool found = false;
    double best_d = 0.0;
    std::pair<NodeKey, NodeKey> best;
    for (const auto& [slot, members] : columns) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const auto pair = std::make_pair(members[a], members[b]);
                if (banned.contains(pair)) continue;
                const double d = D.at(index_of_day_slot.at(pack(pair.first)),
                                      index_of_day_slot.at(pack(pair.second)));
                if (!found || d < best_d ||
                    (d == best_d && std::tie(pair.first.day, pair.second.day, pair.first.slot) <
                                        std::tie(best.first.day, best.second.day, best.first.slot))) {
                    found = true;
                    best_d = d;
                    best = pair;
                }
            }
        }
    }
    if (!found) throw NoSeed();
    return best;
}

std::set<NodeKey> neighbours(const std::set<NodeKey>& P, const NodeGrid& grid,
                             const std::set<NodeKey>& excluded) {
    std::set<int> adjacent_columns;
    for (const auto& key : P) {
        adjacent_columns.insert(key.slot - 1);
        adjacent_columns.insert(key.slot);
        adjacent_columns.insert(key.slot + 1);
    }
    std::set<NodeKey> out;
    for (const auto& [key, node] : grid.nodes) {
        if (P.contains(key) || excluded.contains(key)) continue;
        if (adjacent_columns.contains(key.slot)) out.insert(key);
    }
    return out;
}

double cluster_variance(std::span<const std::pair<double, double>> points) {
    if (points.empty()) throw EmptySet();
    RunningVariance rv;
    for (const auto& [x, y] : points) rv.add(x, y);
    return rv.variance();
}

VarianceTrace grow(const std::pair<NodeKey, NodeKey>& seed, const NodeGrid& grid,
                   const Embedding& embedding, const MinerConfig& cfg,
                   const std::set<NodeKey>& excluded) {
    const int n = static_cast<int>(embedding.node_ids.size());
    std::map<NodeKey, int> index_of;
    for (int i = 0; i < n; ++i) index_of[embedding.node_ids[i]] = i;

    const TimeSlotNode& seed_a = grid.nodes.at(seed.first);
    const TimeSlotNode& seed_b = grid.nodes.at(seed.second);

    VarianceTrace trace;
    trace.order = {seed.first, seed.second};
    trace.v = {node_distance(seed_a, seed_b)};

    // Alg. guard at t=1: the seed distance itself may exceed the cap.
    if (trace.v.back() > cfg.variance_cap) return trace;

    std::vector<char> available(n, 0);
    for (const auto& [key, node] : grid.nodes) {
        if (!excluded.contains(key)) available[index_of.at(key)] = 1;
    }
    available[index_of.at(seed.first)] = 0;
    available[index_of.at(seed.second)] = 0;

    const int slots = grid.slots_per_day();
    std::vector<char> column_adjacent(slots, 0);
    auto mark_columns = [&](int slot) {
        if (slot > 0) column_adjacent[slot - 1] = 1;
        column_adjacent[slot] = 1;
        if (slot + 1 < slots) column_adjacent[slot + 1] = 1;
    };
    mark_columns(seed.first.slot);
    mark_columns(seed.second.slot);

    RunningVariance rv;
    rv.add(embedding.x(index_of.at(seed.first)), embedding.y(index_of.at(seed.first)));
    rv.add(embedding.x(index_of.at(seed.second)), embedding.y(index_of.at(seed.second)));

    // distance to the seed (min over its two nodes), for tie-breaking
    std::vector<double> seed_distance(n, -1.0);
    auto seed_dist = [&](int idx) {
        if (seed_distance[idx] < 0.0) {
            const TimeSlotNode& node = grid.nodes.at(embedding.node_ids[idx]);
            seed_distance[idx] = std::min(node_distance(node, seed_a), node_distance(node, seed_b));
        }
        return seed_distance[idx];
    };

    while (true) {
        int best = -1;
        double best_var = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!available[i]) continue;
            const NodeKey& key = embedding.node_ids[i];
            if (!column_adjacent[key.slot]) continue;
            const double var = rv.variance_with(embedding.x(i), embedding.y(i));
            if (best < 0 || var < best_var) {
                best = i;
                best_var = var;
            } else if (var == best_var) {
                const double ds = seed_dist(i);
                const double best_ds = seed_dist(best);
                if (ds < best_ds ||
                    (ds == best_ds && key < embedding.node_ids[best])) {
                    best = i;
                }
            }
        }
        if (best < 0) break;                       // no neighbours remain
        if (best_var > cfg.variance_cap) break;    // admission would blow the cap
        rv.add(embedding.x(best), embedding.y(best));
        available[best] = 0;
        mark_columns(embedding.node_ids[best].slot);
        trace.order.push_back(embedding.node_ids[best]);
        trace.v.push_back(best_var);
    }
    return trace;
}

std::vector<int> detect_cut(const VarianceTrace& trace, double sigma, double T) {
    if (trace.v.size() < 3) throw TraceTooShort(trace.v.size());
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");

    // v[0] is the seed distance, in different units; derivatives start at v[1]
    const std::vector<double> w(trace.v.begin() + 1, trace.v.end());
    const int n = static_cast<int>(w.size());
    std::vector<int> candidates;
    if (n < 5) return candidates; // no interior stencil room

    const std::vector<double> s = gaussian_smooth(w, sigma);
    // central differences, valid on [1, n-2]
    std::vector<double> d1(n, 0.0), d2(n, 0.0);
    for (int i = 1; i <= n - 2; ++i) {
        d1[i] = (s[i + 1] - s[i - 1]) / 2.0;
        d2[i] = s[i + 1] - 2.0 * s[i] + s[i - 1];
    }

    double max_abs_d2 = 0.0;
    for (int i = 1; i <= n - 2; ++i) max_abs_d2 = std::max(max_abs_d2, std::abs(d2[i]));
    // floating-point noise floor: exactly-flat stretches of v differentiate
    // to ~1e-16 jitter, which must not read as curvature
    const double floor = 1e-9 * max_abs_d2;

    // raw second difference, for re-localising smoothed peaks: smoothing an
    // abrupt variance jump followed by sub-linear growth skews the smoothed
    // curvature peak a few samples early
    std::vector<double> raw_d2(n, 0.0);
    for (int i = 1; i <= n - 2; ++i) raw_d2[i] = w[i + 1] - 2.0 * w[i] + w[i - 1];
    const int snap_radius = std::max(2, static_cast<int>(std::ceil(2.0 * sigma)));

    // the smoothed bump of a single jump spans one kernel radius; to see it
    // decay back to zero the isolation window must reach slightly past that
    const int iso_radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma))) + 2;
    std::set<int> found;
    for (int i = 2; i <= n - 3; ++i) {
        if (!(d2[i] > floor)) continue;
        if (!(d2[i] > d2[i - 1] && d2[i] >= d2[i + 1])) continue; // curvature peak
        if (!(d1[i] > T)) continue;
        // the peak must be an isolated bump: curvature decays back to (or
        // through) zero nearby
        double window_min = d2[i];
        for (int j = std::max(1, i - iso_radius); j <= std::min(n - 2, i + iso_radius); ++j) {
            window_min = std::min(window_min, d2[j]);
        }
        if (window_min > floor) continue;
        // snap to the strongest raw curvature nearby
        int best = i;
        for (int j = std::max(1, i - snap_radius); j <= std::min(n - 2, i + snap_radius); ++j) {
            if (raw_d2[j] > raw_d2[best]) best = j;
        }
        if (raw_d2[best] <= floor) best = i;
        found.insert(best + 1); // w index -> v index
    }
    candidates.assign(found.begin(), found.end());
    return candidates;
}

PatternLabels summarize_labels(const NodeGrid& grid, std::span<const NodeKey> nodes) {
    std::map<std::string, int> scenes;
    std::map<std::string, int> activities;
    std::map<std::string, int> object_nodes;
    for (const auto& key : nodes) {
        const TimeSlotNode& node = grid.nodes.at(key);
        ++scenes[node.scene];
        ++activities[node.activity];
        for (const auto& label : node.objects) ++object_nodes[label];
    }
    auto modal = [](const std::map<std::string, int>& counts) {
        std::string best;
        int best_count = 0;
        for (const auto& [label, count] : counts) {
            if (count > best_count) {
                best = label;
                best_count = count;
            }
        }
        return best;
    };
    PatternLabels labels;
    labels.scene = modal(scenes);
    labels.activity = modal(activities);
    labels.objects.assign(object_nodes.begin(), object_nodes.end());
    return labels;
}

PatternSet mine(const NodeGrid& grid, const DistanceMatrix& D, const Embedding& embedding,
                const MinerConfig& cfg, const CutScorer& scorer) {
    if (!cfg.threshold.has_value()) {
        throw std::invalid_argument("mine needs a resolved threshold; sweep first");
    }
    const double T = *cfg.threshold;

    PatternSet result;
    std::set<NodeKey> excluded;
    std::set<std::pair<NodeKey, NodeKey>> banned;

    while (cfg.max_patterns <= 0 ||
           static_cast<int>(result.patterns.size()) < cfg.max_patterns) {
        std::pair<NodeKey, NodeKey> seed;
        try {
            seed = find_seed(grid, D, excluded, banned);
        } catch (const NoSeed&) {
            break;
        }
        const VarianceTrace trace = grow(seed, grid, embedding, cfg, excluded);

        std::vector<int> candidates;
        if (trace.v.size() >= 3) candidates = detect_cut(trace, cfg.sigma, T);

        std::vector<NodeKey> chosen;
        int cut_index = -1;
        if (candidates.empty()) {
            // no abrupt change found: the whole trace is one candidate pattern
            chosen = trace.order;
        } else {
            std::set<NodeKey> in_trace_available;
            for (const auto& [key, node] : grid.nodes) {
                if (!excluded.contains(key)) in_trace_available.insert(key);
            }
            const int max_k = static_cast<int>(trace.v.size()) - 2;
            double best_sc = 0.0;
            int best_k = -1;
            for (int k : candidates) {
                if (k > max_k) continue; // cutting past the end leaves no rest
                const std::span<const NodeKey> prefix(trace.order.data(),
                                                      static_cast<std::size_t>(k) + 2);
                std::vector<NodeKey> rest;
                std::set<NodeKey> prefix_set(prefix.begin(), prefix.end());
                for (const auto& key : in_trace_available) {
                    if (!prefix_set.contains(key)) rest.push_back(key);
                }
                const double sc = scorer(prefix, rest);
                if (best_k < 0 || sc > best_sc) { // ties keep the smaller k
                    best_sc = sc;
                    best_k = k;
                }
            }
            cut_index = best_k;
            chosen.assign(trace.order.begin(), trace.order.begin() + cut_index + 2);
        }

        std::set<int> days;
        for (const auto& key : chosen) days.insert(key.day);
        const bool passes = static_cast<int>(chosen.size()) >= cfg.min_pattern_nodes &&
                            static_cast<int>(days.size()) >= cfg.min_pattern_days;
        if (!passes) {
            banned.insert(normalize_pair(seed.first, seed.second));
            continue;
        }

        Pattern pattern;
        pattern.id = static_cast<int>(result.patterns.size());
        pattern.nodes = chosen;
        std::sort(pattern.nodes.begin(), pattern.nodes.end());
        pattern.seed = seed;
        pattern.threshold_used = T;
        pattern.cut_index = cut_index;
        pattern.labels = summarize_labels(grid, pattern.nodes);
        for (const auto& key : pattern.nodes) excluded.insert(key);
        result.patterns.push_back(std::move(pattern));
    }

    for (const auto& [key, node] : grid.nodes) {
        if (!excluded.contains(key)) result.unassigned.push_back(key);
    }
    return result;
}

} // namespace routine
