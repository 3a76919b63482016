#include "routine/synth.hpp"

#include "routine/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace routine {

namespace {

void validate(const SynthSpec& spec) {
    if (spec.n_days < 1 || spec.slots_per_day < 1) throw InvalidSpec("grid shape must be positive");
    if (spec.slot_minutes < 1 || spec.slot_minutes * spec.slots_per_day > 1440) {
        throw InvalidSpec("slots do not fit a day");
    }
    if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0) throw InvalidSpec("noise rate outside [0, 1]");
    if (spec.background_density < 0.0 || spec.background_density > 1.0) {
        throw InvalidSpec("background density outside [0, 1]");
    }
    if (!(spec.frq > 0.0)) throw InvalidSpec("frq must be positive");
    if (spec.background_scenes.empty() || spec.background_activities.empty() ||
        spec.background_objects.empty()) {
        throw InvalidSpec("background pools must be non-empty");
    }

    std::set<std::pair<int, int>> covered;
    for (std::size_t p = 0; p < spec.planted.size(); ++p) {
        const PlantedPattern& pat = spec.planted[p];
        if (pat.slot_lo < 0 || pat.slot_hi >= spec.slots_per_day || pat.slot_lo > pat.slot_hi) {
            throw InvalidSpec("planted slot range outside the grid");
        }
        if (pat.days.empty()) throw InvalidSpec("planted pattern needs at least one day");
        if (pat.images_per_slot < 1) throw InvalidSpec("planted images_per_slot must be >= 1");
        for (int day : pat.days) {
            if (day < 0 || day >= spec.n_days) throw InvalidSpec("planted day outside the grid");
            for (int slot = pat.slot_lo; slot <= pat.slot_hi; ++slot) {
                if (!covered.insert({day, slot}).second) {
                    throw InvalidSpec("planted patterns overlap at day " + std::to_string(day) +
                                      " slot " + std::to_string(slot));
                }
            }
        }
    }
}

const std::string& pick(const std::vector<std::string>& pool, SplitMix64& rng) {
    return pool[rng.next_below(pool.size())];
}

} // namespace

SynthResult generate(const SynthSpec& spec) {
    validate(spec);
    SplitMix64 rng(spec.seed);

    const int spacing = std::max(1, static_cast<int>(std::llround(1.0 / spec.frq)));
    auto slot_minutes_ok = [&](int images) { return (images - 1) * spacing < spec.slot_minutes; };
    for (const auto& pat : spec.planted) {
        if (!slot_minutes_ok(pat.images_per_slot)) {
            throw InvalidSpec("images_per_slot does not fit the slot at 1/frq spacing");
        }
    }
    if (!slot_minutes_ok(spec.background_images_per_slot)) {
        throw InvalidSpec("background images_per_slot does not fit the slot");
    }

    // planted lookup
    std::map<std::pair<int, int>, int> planted_at;
    for (std::size_t p = 0; p < spec.planted.size(); ++p) {
        for (int day : spec.planted[p].days) {
            for (int slot = spec.planted[p].slot_lo; slot <= spec.planted[p].slot_hi; ++slot) {
                planted_at[{day, slot}] = static_cast<int>(p);
            }
        }
    }

    SynthResult result;
    result.truth.n_days = spec.n_days;
    result.truth.slots_per_day = spec.slots_per_day;

    auto maybe_noisy = [&](const std::string& label, const std::vector<std::string>& pool) {
        if (spec.noise_rate > 0.0 && rng.next_double() < spec.noise_rate) return pick(pool, rng);
        return label;
    };

    auto emit_slot = [&](int day, int slot, const std::string& date, const std::string& scene,
                         const std::string& activity, const std::vector<std::string>& objects,
                         int images, bool noisy) {
        for (int k = 0; k < images; ++k) {
            ConceptRecord record;
            record.user_id = spec.user_id;
            record.day = date;
            record.minute_of_day = slot * spec.slot_minutes + k * spacing;
            record.scene = noisy ? maybe_noisy(scene, spec.background_scenes) : scene;
            record.activity = noisy ? maybe_noisy(activity, spec.background_activities) : activity;
            for (const auto& label : objects) {
                const std::string emitted =
                    noisy ? maybe_noisy(label, spec.background_objects) : label;
                record.objects.push_back({emitted, 0.9});
            }
            result.records.push_back(std::move(record));
        }
        (void)day;
    };

    for (int day = 0; day < spec.n_days; ++day) {
        const std::string date = add_days(spec.base_date, day);
        bool day_has_records = false;
        for (int slot = 0; slot < spec.slots_per_day; ++slot) {
            const auto planted_it = planted_at.find({day, slot});
            if (planted_it != planted_at.end()) {
                const PlantedPattern& pat = spec.planted[planted_it->second];
                emit_slot(day, slot, date, pat.scene, pat.activity, pat.objects,
                          pat.images_per_slot, /*noisy=*/true);
                result.truth.assignments[NodeKey{day, slot}] = planted_it->second;
                day_has_records = true;
                continue;
            }
            if (rng.next_double() >= spec.background_density) continue;
            // a background slot holds one scene/activity and a small set of
            // objects shared by its images
            std::string scene, activity;
            std::vector<std::string> objects;
            if (spec.background_contexts > 0) {
                // recurring context template
                const std::size_t c = rng.next_below(spec.background_contexts);
                scene = spec.background_scenes[c % spec.background_scenes.size()];
                activity = spec.background_activities[c % spec.background_activities.size()];
                for (int k = 0; k < spec.background_objects_per_slot; ++k) {
                    objects.push_back(spec.background_objects[(c * spec.background_objects_per_slot +
                                                               k) %
                                                              spec.background_objects.size()]);
                }
                std::sort(objects.begin(), objects.end());
                objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
            } else {
                scene = pick(spec.background_scenes, rng);
                activity = pick(spec.background_activities, rng);
                std::set<std::size_t> chosen;
                const int want = std::min<int>(spec.background_objects_per_slot,
                                               static_cast<int>(spec.background_objects.size()));
                while (static_cast<int>(chosen.size()) < want) {
                    chosen.insert(rng.next_below(spec.background_objects.size()));
                }
                for (std::size_t idx : chosen) objects.push_back(spec.background_objects[idx]);
            }
            emit_slot(day, slot, date, scene, activity, objects,
                      spec.background_images_per_slot, /*noisy=*/false);
            result.truth.assignments[NodeKey{day, slot}] = -1;
            day_has_records = true;
        }
        if (!day_has_records) {
            // keep every day represented so day indices stay aligned
            const int slot = spec.slots_per_day / 2;
            emit_slot(day, slot, date, pick(spec.background_scenes, rng),
                      pick(spec.background_activities, rng),
                      {spec.background_objects.front()}, spec.background_images_per_slot,
                      /*noisy=*/false);
            result.truth.assignments[NodeKey{day, slot}] = -1;
        }
    }
    return result;
}

EvalReport evaluate(const PatternSet& found, const GroundTruth& truth) {
    std::map<int, std::set<NodeKey>> planted;
    for (const auto& [key, id] : truth.assignments) {
        if (id >= 0) planted[id].insert(key);
    }

    struct Overlap {
        int planted_id;
        int found_id;
        int count;
    };
    std::vector<Overlap> overlaps;
    for (const auto& [planted_id, members] : planted) {
        for (const auto& pattern : found.patterns) {
            int count = 0;
            for (const auto& key : pattern.nodes) {
                if (members.contains(key)) ++count;
            }
            if (count > 0) overlaps.push_back({planted_id, pattern.id, count});
        }
    }
    // greedy matching: biggest overlap first, ties to the lower found id
    // (then lower planted id); each side used once
    std::stable_sort(overlaps.begin(), overlaps.end(), [](const Overlap& a, const Overlap& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.found_id != b.found_id) return a.found_id < b.found_id;
        return a.planted_id < b.planted_id;
    });

    std::map<int, const Pattern*> found_by_id;
    for (const auto& pattern : found.patterns) found_by_id[pattern.id] = &pattern;

    std::set<int> used_planted, used_found;
    std::map<int, std::pair<int, int>> match; // planted -> (found, overlap)
    for (const auto& o : overlaps) {
        if (used_planted.contains(o.planted_id) || used_found.contains(o.found_id)) continue;
        used_planted.insert(o.planted_id);
        used_found.insert(o.found_id);
        match[o.planted_id] = {o.found_id, o.count};
    }

    EvalReport report;
    double f1_sum = 0.0;
    for (const auto& [planted_id, members] : planted) {
        PatternMatch m;
        m.planted_id = planted_id;
        const auto it = match.find(planted_id);
        if (it != match.end()) {
            m.found_id = it->second.first;
            const double overlap = it->second.second;
            const double found_size =
                static_cast<double>(found_by_id.at(m.found_id)->nodes.size());
            m.precision = overlap / found_size;
            m.recall = overlap / static_cast<double>(members.size());
            m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        }
        f1_sum += m.f1;
        report.per_planted.push_back(m);
    }
    report.macro_f1 = planted.empty() ? 0.0 : f1_sum / static_cast<double>(planted.size());
    return report;
}

} // namespace routine
