#include "routine/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>

namespace routine {

SilhouetteResult silhouette(const DistanceMatrix& D, const std::vector<int>& labels) {
    const int n = D.size();
    if (static_cast<int>(labels.size()) != n) {
        throw std::invalid_argument("labels size does not match matrix");
    }

    std::map<int, std::vector<int>> clusters;
    for (int i = 0; i < n; ++i) {
        if (labels[i] >= 0) clusters[labels[i]].push_back(i);
    }
    if (clusters.size() < 2) throw SingleCluster();

    SilhouetteResult result;
    result.values.assign(n, 0.0);
    result.labelled.assign(n, 0);

    double sum = 0.0;
    long count = 0;
    for (const auto& [cluster_id, members] : clusters) {
        for (int i : members) {
            result.labelled[i] = 1;
            ++count;
            if (members.size() == 1) continue; // singleton: s = 0

            double a = 0.0;
            for (int j : members) {
                if (j != i) a += D.at(i, j);
            }
            a /= static_cast<double>(members.size() - 1);

            double b = std::numeric_limits<double>::infinity();
            for (const auto& [other_id, other_members] : clusters) {
                if (other_id == cluster_id) continue;
                double mean = 0.0;
                for (int j : other_members) mean += D.at(i, j);
                mean /= static_cast<double>(other_members.size());
                b = std::min(b, mean);
            }

            const double denom = std::max(a, b);
            const double s = denom > 0.0 ? (b - a) / denom : 0.0;
            result.values[i] = s;
            sum += s;
        }
    }
    result.mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
    return result;
}

double representativeness_term(const NodeGrid& grid, std::span<const NodeKey> nodes, double frq) {
    if (nodes.empty()) throw EmptySet();

    // per-day occurrence span: last image minute minus first image minute
    // over the pattern's nodes of that day, summed across occurrences
    std::map<int, std::pair<int, int>> day_span; // day -> (first, last)
    long images = 0;
    for (const auto& key : nodes) {
        const TimeSlotNode& node = grid.nodes.at(key);
        images += node.image_count;
        auto it = day_span.find(key.day);
        if (it == day_span.end()) {
            day_span[key.day] = {node.first_minute, node.last_minute};
        } else {
            it->second.first = std::min(it->second.first, node.first_minute);
            it->second.second = std::max(it->second.second, node.last_minute);
        }
    }
    double span_minutes = 0.0;
    for (const auto& [day, span] : day_span) span_minutes += span.second - span.first;

    const double day_fraction =
        static_cast<double>(day_span.size()) / static_cast<double>(grid.n_days());
    const double images_per_hour = 60.0 * frq;
    const double image_ratio =
        static_cast<double>(images) / std::max(images_per_hour, span_minutes * frq);
    return day_fraction + image_ratio;
}

double t_rpr(const PatternSet& patterns, const NodeGrid& grid, double frq) {
    if (patterns.patterns.empty()) throw NoPatterns();
    double sum = 0.0;
    for (const auto& pattern : patterns.patterns) {
        sum += representativeness_term(grid, pattern.nodes, frq);
    }
    return sum / static_cast<double>(patterns.patterns.size());
}

CutScorer make_cut_scorer(const NodeGrid& grid, const DistanceMatrix& D, double frq) {
    // matrix index lookup shared across invocations
    auto index_of = std::make_shared<std::map<NodeKey, int>>();
    const auto& keys = D.keys();
    for (int i = 0; i < static_cast<int>(keys.size()); ++i) (*index_of)[keys[i]] = i;

    return [&grid, &D, frq, index_of](std::span<const NodeKey> pattern,
                                      std::span<const NodeKey> rest) {
        std::vector<int> labels(D.size(), -1);
        for (const auto& key : pattern) labels[index_of->at(key)] = 0;
        for (const auto& key : rest) labels[index_of->at(key)] = 1;
        double sl = 0.0;
        try {
            sl = silhouette(D, labels).mean;
        } catch (const SingleCluster&) {
            sl = 0.0; // nothing left outside the candidate
        }
        return sc(sl, representativeness_term(grid, pattern, frq));
    };
}

ScoreReport score_pattern_set(const NodeGrid& grid, const DistanceMatrix& D,
                              const PatternSet& ps, double frq) {
    ScoreReport report;
    if (ps.patterns.empty()) return report; // sc = 0 for an empty set

    std::map<NodeKey, int> index_of;
    const auto& keys = D.keys();
    for (int i = 0; i < static_cast<int>(keys.size()); ++i) index_of[keys[i]] = i;

    if (ps.patterns.size() >= 2) {
        std::vector<int> labels(D.size(), -1);
        for (const auto& pattern : ps.patterns) {
            for (const auto& key : pattern.nodes) labels[index_of.at(key)] = pattern.id;
        }
        const SilhouetteResult sil = silhouette(D, labels);
        report.global_silhouette = sil.mean;
        for (const auto& pattern : ps.patterns) {
            double sum = 0.0;
            for (const auto& key : pattern.nodes) sum += sil.values[index_of.at(key)];
            report.per_pattern_silhouette.emplace_back(
                pattern.id, sum / static_cast<double>(pattern.nodes.size()));
        }
    } else {
        // a lone cluster has no separation to measure
        report.global_silhouette = 0.0;
        report.per_pattern_silhouette.emplace_back(ps.patterns.front().id, 0.0);
    }

    report.t_rpr = t_rpr(ps, grid, frq);
    report.sc = sc(report.global_silhouette, report.t_rpr);
    if (!ps.patterns.empty()) report.threshold_used = ps.patterns.front().threshold_used;
    return report;
}

SweepResult sweep_threshold(const NodeGrid& grid, const DistanceMatrix& D,
                            const Embedding& embedding, const MinerConfig& cfg, double frq) {
    if (!(cfg.sweep_lo < cfg.sweep_hi) || !(cfg.sweep_step > 0.0)) {
        throw std::invalid_argument("sweep needs lo < hi and step > 0");
    }
    const CutScorer scorer = make_cut_scorer(grid, D, frq);

    SweepResult result;
    bool have_best = false;
    double best_sc = 0.0;
    const int steps =
        static_cast<int>(std::floor((cfg.sweep_hi - cfg.sweep_lo) / cfg.sweep_step + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        const double T = cfg.sweep_lo + i * cfg.sweep_step;
        MinerConfig point = cfg;
        point.threshold = T;
        const PatternSet ps = mine(grid, D, embedding, point, scorer);
        const double score = score_pattern_set(grid, D, ps, frq).sc;
        result.table.emplace_back(T, score);
        if (!have_best || score > best_sc) { // ties keep the smaller T
            have_best = true;
            best_sc = score;
            result.best_threshold = T;
        }
    }
    return result;
}

} // namespace routine
