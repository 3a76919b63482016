#include "routine/io.hpp"

#include "routine/util.hpp"

#include <fstream>

#include <json.hpp>

namespace routine {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json key_json(const NodeKey& key) {
    return ordered_json{{"day_index", key.day}, {"slot_index", key.slot}};
}

NodeKey key_from_json(const ordered_json& j) {
    return NodeKey{j.at("day_index").get<int>(), j.at("slot_index").get<int>()};
}

} // namespace

void write_concept_log(std::ostream& out, const std::vector<ConceptRecord>& records) {
    for (const auto& r : records) {
        ordered_json objects = ordered_json::array();
        for (const auto& det : r.objects) {
            objects.push_back({{"label", det.label}, {"conf", det.confidence}});
        }
        const ordered_json line{{"user", r.user_id},
                                {"day", r.day},
                                {"time", format_minute_of_day(r.minute_of_day)},
                                {"scene", r.scene},
                                {"activity", r.activity},
                                {"objects", objects}};
        out << line.dump() << '\n';
    }
}

void write_node_grid(std::ostream& out, const NodeGrid& grid) {
    for (const auto& [key, node] : grid.nodes) {
        const ordered_json line{{"day_index", node.day_index},
                                {"slot_index", node.slot_index},
                                {"scene", node.scene},
                                {"activity", node.activity},
                                {"objects", node.objects},
                                {"image_count", node.image_count}};
        out << line.dump() << '\n';
    }
}

GridMeta grid_meta(const NodeGrid& grid) {
    return GridMeta{grid.user_id, grid.n_days(), grid.slots_per_day(), grid.slot_minutes};
}

std::string pattern_set_json(const PatternSet& ps, const GridMeta& meta,
                             const std::string& method) {
    ordered_json j;
    j["method"] = method;
    j["grid"] = {{"user_id", meta.user_id},
                 {"n_days", meta.n_days},
                 {"slots_per_day", meta.slots_per_day},
                 {"slot_minutes", meta.slot_minutes}};
    j["patterns"] = ordered_json::array();
    for (const auto& pattern : ps.patterns) {
        ordered_json objects = ordered_json::array();
        for (const auto& [label, node_count] : pattern.labels.objects) {
            objects.push_back({{"label", label}, {"node_count", node_count}});
        }
        ordered_json nodes = ordered_json::array();
        for (const auto& key : pattern.nodes) nodes.push_back(key_json(key));
        j["patterns"].push_back({{"id", pattern.id},
                                 {"threshold_used", pattern.threshold_used},
                                 {"seed", {key_json(pattern.seed.first), key_json(pattern.seed.second)}},
                                 {"cut_index", pattern.cut_index},
                                 {"nodes", nodes},
                                 {"scene", pattern.labels.scene},
                                 {"activity", pattern.labels.activity},
                                 {"objects", objects}});
    }
    j["unassigned"] = ordered_json::array();
    for (const auto& key : ps.unassigned) j["unassigned"].push_back(key_json(key));
    return j.dump(2) + "\n";
}

LoadedPatternSet load_pattern_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pattern file '" + path.string() + "'");
    ordered_json j = ordered_json::parse(in);

    LoadedPatternSet loaded;
    loaded.method = j.value("method", "unknown");
    const auto& grid = j.at("grid");
    loaded.meta.user_id = grid.at("user_id").get<std::string>();
    loaded.meta.n_days = grid.at("n_days").get<int>();
    loaded.meta.slots_per_day = grid.at("slots_per_day").get<int>();
    loaded.meta.slot_minutes = grid.value("slot_minutes", 30);

    for (const auto& pj : j.at("patterns")) {
        Pattern pattern;
        pattern.id = pj.at("id").get<int>();
        pattern.threshold_used = pj.at("threshold_used").get<double>();
        pattern.cut_index = pj.at("cut_index").get<int>();
        pattern.seed = {key_from_json(pj.at("seed")[0]), key_from_json(pj.at("seed")[1])};
        for (const auto& nj : pj.at("nodes")) pattern.nodes.push_back(key_from_json(nj));
        pattern.labels.scene = pj.at("scene").get<std::string>();
        pattern.labels.activity = pj.at("activity").get<std::string>();
        for (const auto& oj : pj.at("objects")) {
            pattern.labels.objects.emplace_back(oj.at("label").get<std::string>(),
                                                oj.at("node_count").get<int>());
        }
        loaded.set.patterns.push_back(std::move(pattern));
    }
    for (const auto& nj : j.at("unassigned")) loaded.set.unassigned.push_back(key_from_json(nj));
    return loaded;
}

std::string score_report_json(const ScoreReport& report) {
    ordered_json j;
    j["threshold_used"] = report.threshold_used;
    j["silhouette"] = {{"global", report.global_silhouette}};
    j["silhouette"]["per_pattern"] = ordered_json::array();
    for (const auto& [id, mean] : report.per_pattern_silhouette) {
        j["silhouette"]["per_pattern"].push_back({{"id", id}, {"mean", mean}});
    }
    j["t_rpr"] = report.t_rpr;
    j["sc"] = report.sc;
    j["sweep"] = ordered_json::array();
    for (const auto& [t, score] : report.sweep) {
        j["sweep"].push_back({{"T", t}, {"sc", score}});
    }
    return j.dump(2) + "\n";
}

std::string ground_truth_json(const GroundTruth& truth) {
    ordered_json j;
    j["n_days"] = truth.n_days;
    j["slots_per_day"] = truth.slots_per_day;
    j["assignments"] = ordered_json::array();
    for (const auto& [key, id] : truth.assignments) {
        ordered_json a = key_json(key);
        a["pattern"] = id;
        j["assignments"].push_back(a);
    }
    return j.dump(2) + "\n";
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ground truth '" + path.string() + "'");
    ordered_json j = ordered_json::parse(in);
    GroundTruth truth;
    truth.n_days = j.at("n_days").get<int>();
    truth.slots_per_day = j.at("slots_per_day").get<int>();
    for (const auto& a : j.at("assignments")) {
        truth.assignments[key_from_json(a)] = a.at("pattern").get<int>();
    }
    return truth;
}

std::string eval_report_json(const EvalReport& report) {
    ordered_json j;
    j["per_planted"] = ordered_json::array();
    for (const auto& m : report.per_planted) {
        j["per_planted"].push_back({{"planted_id", m.planted_id},
                                    {"found_id", m.found_id},
                                    {"precision", m.precision},
                                    {"recall", m.recall},
                                    {"f1", m.f1}});
    }
    j["macro_f1"] = report.macro_f1;
    return j.dump(2) + "\n";
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open synth spec '" + path.string() + "'");
    ordered_json j = ordered_json::parse(in);

    SynthSpec spec;
    spec.user_id = j.value("user_id", spec.user_id);
    spec.base_date = j.value("base_date", spec.base_date);
    spec.n_days = j.value("n_days", spec.n_days);
    spec.slots_per_day = j.value("slots_per_day", spec.slots_per_day);
    spec.slot_minutes = j.value("slot_minutes", spec.slot_minutes);
    spec.frq = j.value("frq", spec.frq);
    spec.background_density = j.value("background_density", spec.background_density);
    spec.background_images_per_slot =
        j.value("background_images_per_slot", spec.background_images_per_slot);
    spec.background_objects_per_slot =
        j.value("background_objects_per_slot", spec.background_objects_per_slot);
    spec.background_contexts = j.value("background_contexts", spec.background_contexts);
    spec.noise_rate = j.value("noise_rate", spec.noise_rate);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("background_scenes")) {
        spec.background_scenes = j.at("background_scenes").get<std::vector<std::string>>();
    }
    if (j.contains("background_activities")) {
        spec.background_activities = j.at("background_activities").get<std::vector<std::string>>();
    }
    if (j.contains("background_objects")) {
        spec.background_objects = j.at("background_objects").get<std::vector<std::string>>();
    }
    if (j.contains("planted")) {
        for (const auto& pj : j.at("planted")) {
            PlantedPattern pat;
            pat.slot_lo = pj.at("slot_lo").get<int>();
            pat.slot_hi = pj.at("slot_hi").get<int>();
            pat.days = pj.at("days").get<std::vector<int>>();
            pat.scene = pj.at("scene").get<std::string>();
            pat.activity = pj.at("activity").get<std::string>();
            pat.objects = pj.at("objects").get<std::vector<std::string>>();
            pat.images_per_slot = pj.value("images_per_slot", pat.images_per_slot);
            spec.planted.push_back(std::move(pat));
        }
    }
    return spec;
}

namespace {

void write_double(std::ostream& out, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    out << buf;
}

} // namespace

void write_distance_csv(std::ostream& out, const DistanceMatrix& D) {
    out << "node";
    for (const auto& key : D.keys()) out << ',' << key.day << ':' << key.slot;
    out << '\n';
    for (int i = 0; i < D.size(); ++i) {
        out << D.keys()[i].day << ':' << D.keys()[i].slot;
        for (int j = 0; j < D.size(); ++j) {
            out << ',';
            write_double(out, D.at(i, j));
        }
        out << '\n';
    }
}

void write_coords_csv(std::ostream& out, const Embedding& embedding) {
    out << "day_index,slot_index,x,y\n";
    for (std::size_t i = 0; i < embedding.node_ids.size(); ++i) {
        const auto& key = embedding.node_ids[i];
        out << key.day << ',' << key.slot << ',';
        write_double(out, embedding.x(static_cast<int>(i)));
        out << ',';
        write_double(out, embedding.y(static_cast<int>(i)));
        out << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<std::pair<double, double>>& table) {
    out << "T,sc\n";
    for (const auto& [t, score] : table) {
        write_double(out, t);
        out << ',';
        write_double(out, score);
        out << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const PatternSet& ps) {
    out << "pattern_id,days\n";
    for (const auto& pattern : ps.patterns) {
        out << pattern.id << ',' << pattern.distinct_days() << '\n';
    }
}

namespace {

// muted categorical palette; pattern id maps to id % size
const char* const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};
constexpr int kPaletteSize = static_cast<int>(sizeof(kPalette) / sizeof(kPalette[0]));

} // namespace

std::string timeline_svg(const PatternSet& ps, const GridMeta& meta) {
    const int cell = 12;
    const int left = 30, top = 20;
    const int width = left + meta.slots_per_day * cell + 10;
    const int height = top + meta.n_days * cell + 10;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(top) + "\" width=\"" +
           std::to_string(meta.slots_per_day * cell) + "\" height=\"" +
           std::to_string(meta.n_days * cell) + "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
    for (const auto& pattern : ps.patterns) {
        const std::string fill = kPalette[pattern.id % kPaletteSize];
        for (const auto& key : pattern.nodes) {
            svg += "<rect x=\"" + std::to_string(left + key.slot * cell) + "\" y=\"" +
                   std::to_string(top + key.day * cell) + "\" width=\"" + std::to_string(cell) +
                   "\" height=\"" + std::to_string(cell) + "\" fill=\"" + fill +
                   "\"><title>pattern " + std::to_string(pattern.id) + " day " +
                   std::to_string(key.day) + " slot " + std::to_string(key.slot) +
                   "</title></rect>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

std::string histogram_svg(const PatternSet& ps) {
    const int bar = 24, gap = 8, left = 30, bottom = 20, chart_height = 120;
    int max_days = 1;
    for (const auto& pattern : ps.patterns) max_days = std::max(max_days, pattern.distinct_days());

    const int width = left + static_cast<int>(ps.patterns.size()) * (bar + gap) + 10;
    const int height = chart_height + bottom + 10;
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    int x = left;
    for (const auto& pattern : ps.patterns) {
        const int days = pattern.distinct_days();
        const int h = chart_height * days / max_days;
        svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" +
               std::to_string(chart_height - h + 10) + "\" width=\"" + std::to_string(bar) +
               "\" height=\"" + std::to_string(h) + "\" fill=\"" +
               kPalette[pattern.id % kPaletteSize] + "\"/>\n";
        svg += "<text x=\"" + std::to_string(x + bar / 2) + "\" y=\"" +
               std::to_string(chart_height + bottom) +
               "\" font-size=\"10\" text-anchor=\"middle\">" + std::to_string(pattern.id) +
               "</text>\n";
        x += bar + gap;
    }
    svg += "</svg>\n";
    return svg;
}

void RunManifest::set_config(const std::string& key, const std::string& value) {
    config_.emplace_back(key, value);
}

void RunManifest::set_config(const std::string& key, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    config_.emplace_back(key, buf);
}

void RunManifest::set_config(const std::string& key, int value) {
    config_.emplace_back(key, std::to_string(value));
}

void RunManifest::set_timing(const std::string& stage, double milliseconds) {
    timings_.emplace_back(stage, milliseconds);
}

std::string RunManifest::to_json() const {
    ordered_json j;
    j["command"] = command_;
    j["version"] = kProjectVersion;
    j["inputs"] = inputs_;
    j["config"] = ordered_json::object();
    for (const auto& [key, value] : config_) j["config"][key] = value;
    j["outputs"] = outputs_;
    j["timings_ms"] = ordered_json::object();
    for (const auto& [stage, ms] : timings_) j["timings_ms"][stage] = ms;
    return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

} // namespace routine
