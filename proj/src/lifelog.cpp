#include "routine/lifelog.hpp"

#include "routine/util.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <json.hpp>

namespace routine {

std::vector<NodeKey> NodeGrid::keys() const {
    std::vector<NodeKey> out;
    out.reserve(nodes.size());
    for (const auto& [key, node] : nodes) out.push_back(key);
    return out;
}

namespace {

using nlohmann::json;

ConceptRecord record_from_json(const json& j, std::size_t line_no) {
    if (!j.is_object()) throw MalformedRecord(line_no, "record is not an object");
    for (const char* field : {"user", "day", "time", "scene", "activity", "objects"}) {
        if (!j.contains(field)) {
            throw MalformedRecord(line_no, std::string("missing field '") + field + "'");
        }
    }
    ConceptRecord r;
    try {
        r.user_id = j.at("user").get<std::string>();
        r.day = j.at("day").get<std::string>();
        parse_date(r.day);
        r.minute_of_day = parse_minute_of_day(j.at("time").get<std::string>());
        r.scene = j.at("scene").get<std::string>();
        r.activity = j.at("activity").get<std::string>();
        for (const auto& o : j.at("objects")) {
            ObjectDetection det;
            det.label = o.at("label").get<std::string>();
            det.confidence = o.at("conf").get<double>();
            if (det.confidence < 0.0 || det.confidence > 1.0) {
                throw std::invalid_argument(
                    "confidence " + std::to_string(det.confidence) + " outside [0, 1]");
            }
            r.objects.push_back(std::move(det));
        }
    } catch (const json::exception& e) {
        throw MalformedRecord(line_no, e.what());
    } catch (const std::invalid_argument& e) {
        throw MalformedRecord(line_no, e.what());
    }
    if (r.scene.empty()) throw MalformedRecord(line_no, "empty scene label");
    if (r.activity.empty()) throw MalformedRecord(line_no, "empty activity label");
    return r;
}

// Modal label; ties go to the lexicographically smallest label.
std::string modal_label(const std::map<std::string, int>& counts) {
    std::string best;
    int best_count = 0;
    for (const auto& [label, count] : counts) { // ascending label order
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

} // namespace

std::vector<ConceptRecord> parse_concept_log(std::istream& in) {
    std::vector<ConceptRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw MalformedRecord(line_no, "invalid JSON");
        records.push_back(record_from_json(j, line_no));
    }
    if (records.empty()) throw EmptyInput();
    return records;
}

NodeGrid build_nodes(const std::vector<ConceptRecord>& records, const IngestConfig& cfg) {
    if (cfg.slot_minutes <= 0 || 1440 % cfg.slot_minutes != 0) {
        throw std::invalid_argument("slot_minutes must divide 1440");
    }
    if (cfg.min_images_per_slot < 1) {
        throw std::invalid_argument("min_images_per_slot must be >= 1");
    }
    if (records.empty()) throw NoNodes();

    for (const auto& r : records) {
        if (r.user_id != records.front().user_id) {
            throw std::invalid_argument("records span multiple users: '" +
                                        records.front().user_id + "' and '" + r.user_id + "'");
        }
    }

    // Day indices follow chronological order of the dates present; gaps in
    // the calendar do not create empty rows.
    std::set<std::string> dates;
    for (const auto& r : records) dates.insert(r.day);

    NodeGrid grid;
    grid.user_id = records.front().user_id;
    grid.slot_minutes = cfg.slot_minutes;
    grid.days.assign(dates.begin(), dates.end()); // ISO strings sort chronologically

    std::unordered_map<std::string, int> day_index;
    for (int i = 0; i < static_cast<int>(grid.days.size()); ++i) day_index[grid.days[i]] = i;

    struct Cell {
        std::map<std::string, int> scenes;
        std::map<std::string, int> activities;
        std::map<std::string, int> object_images; // label -> distinct images containing it
        int image_count = 0;
        int first_minute = 1440;
        int last_minute = -1;
    };
    std::map<NodeKey, Cell> cells;

    for (const auto& r : records) {
        NodeKey key{day_index.at(r.day), r.minute_of_day / cfg.slot_minutes};
        Cell& cell = cells[key];
        ++cell.image_count;
        ++cell.scenes[r.scene];
        ++cell.activities[r.activity];
        cell.first_minute = std::min(cell.first_minute, r.minute_of_day);
        cell.last_minute = std::max(cell.last_minute, r.minute_of_day);
        // per distinct image: multiple detections of one label count once
        std::set<std::string> seen;
        for (const auto& det : r.objects) {
            if (det.confidence > cfg.object_conf_min) seen.insert(det.label);
        }
        for (const auto& label : seen) ++cell.object_images[label];
    }

    for (const auto& [key, cell] : cells) {
        if (cell.image_count < cfg.min_images_per_slot) continue;
        TimeSlotNode node;
        node.day_index = key.day;
        node.slot_index = key.slot;
        node.scene = modal_label(cell.scenes);
        node.activity = modal_label(cell.activities);
        for (const auto& [label, images] : cell.object_images) {
            if (images > cfg.object_min_count) node.objects.push_back(label);
        }
        node.image_count = cell.image_count;
        node.first_minute = cell.first_minute;
        node.last_minute = cell.last_minute;
        grid.nodes.emplace(key, std::move(node));
    }

    if (grid.nodes.empty()) throw NoNodes();
    return grid;
}

} // namespace routine
