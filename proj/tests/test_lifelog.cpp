#include <doctest.h>

#include "routine/lifelog.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace routine;

namespace {

ConceptRecord make_record(const std::string& day, int minute, const std::string& scene,
                          const std::string& activity,
                          std::vector<ObjectDetection> objects = {}) {
    ConceptRecord r;
    r.user_id = "u1";
    r.day = day;
    r.minute_of_day = minute;
    r.scene = scene;
    r.activity = activity;
    r.objects = std::move(objects);
    return r;
}

} // namespace

TEST_CASE("parse_concept_log accepts well-formed lines in order") {
    std::istringstream in(
        R"({"user":"u1","day":"2024-03-04","time":"09:10","scene":"office","activity":"working","objects":[{"label":"person","conf":0.9}]})"
        "\n"
        R"({"user":"u1","day":"2024-03-04","time":"09:12","scene":"office","activity":"working","objects":[]})"
        "\n");
    const auto records = parse_concept_log(in);
    REQUIRE(records.size() == 2);
    CHECK(records[0].scene == "office");
    CHECK(records[0].activity == "working");
    CHECK(records[0].minute_of_day == 550);
    REQUIRE(records[0].objects.size() == 1);
    CHECK(records[0].objects[0].label == "person");
    CHECK(records[0].objects[0].confidence == doctest::Approx(0.9));
    CHECK(records[1].objects.empty());
}

TEST_CASE("parse_concept_log rejects bad confidence") {
    std::istringstream in(
        R"({"user":"u1","day":"2024-03-04","time":"09:10","scene":"office","activity":"working","objects":[{"label":"tv","conf":1.3}]})"
        "\n");
    CHECK_THROWS_AS(parse_concept_log(in), MalformedRecord);
}

TEST_CASE("parse_concept_log reports the offending line") {
    std::istringstream in(
        R"({"user":"u1","day":"2024-03-04","time":"09:10","scene":"s","activity":"a","objects":[]})"
        "\n"
        "not json\n");
    try {
        parse_concept_log(in);
        FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("parse_concept_log empty input") {
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_concept_log(empty), EmptyInput);
    std::istringstream blank("\n  \n");
    CHECK_THROWS_AS(parse_concept_log(blank), EmptyInput);
}

TEST_CASE("parse_concept_log rejects missing fields and bad values") {
    for (const char* line :
         {R"({"day":"2024-03-04","time":"09:10","scene":"s","activity":"a","objects":[]})",
          R"({"user":"u","day":"2024-13-04","time":"09:10","scene":"s","activity":"a","objects":[]})",
          R"({"user":"u","day":"2024-03-04","time":"25:10","scene":"s","activity":"a","objects":[]})",
          R"({"user":"u","day":"2024-03-04","time":"09:10","scene":"","activity":"a","objects":[]})"}) {
        std::istringstream in(std::string(line) + "\n");
        CHECK_THROWS_AS(parse_concept_log(in), MalformedRecord);
    }
}

TEST_CASE("build_nodes applies the modal and object rules") {
    std::vector<ConceptRecord> records;
    // 12 records in slot 18 (09:00-09:30), all office/working, person in all 12
    for (int i = 0; i < 12; ++i) {
        records.push_back(make_record("2024-03-04", 540 + 2 * i, "office", "working",
                                      {{"person", 0.9}}));
    }
    const NodeGrid grid = build_nodes(records, IngestConfig{});
    REQUIRE(grid.nodes.size() == 1);
    const TimeSlotNode& node = grid.nodes.at(NodeKey{0, 18});
    CHECK(node.scene == "office");
    CHECK(node.activity == "working");
    CHECK(node.objects == std::vector<std::string>{"person"});
    CHECK(node.image_count == 12);
    CHECK(node.first_minute == 540);
    CHECK(node.last_minute == 562);
}

TEST_CASE("object in exactly object_min_count images is excluded") {
    std::vector<ConceptRecord> records;
    for (int i = 0; i < 12; ++i) {
        std::vector<ObjectDetection> objects = {{"person", 0.9}};
        if (i < 10) objects.push_back({"cup", 0.9}); // exactly 10 images
        if (i < 11) objects.push_back({"desk", 0.9}); // 11 images
        records.push_back(make_record("2024-03-04", 540 + i, "office", "working", objects));
    }
    const NodeGrid grid = build_nodes(records, IngestConfig{});
    const TimeSlotNode& node = grid.nodes.at(NodeKey{0, 18});
    CHECK(node.objects == std::vector<std::string>{"desk", "person"});
}

TEST_CASE("low-confidence detections are ignored entirely") {
    std::vector<ConceptRecord> records;
    for (int i = 0; i < 12; ++i) {
        records.push_back(make_record("2024-03-04", 540 + i, "office", "working",
                                      {{"tv", 0.4}, {"person", 0.9}}));
    }
    const NodeGrid grid = build_nodes(records, IngestConfig{});
    CHECK(grid.nodes.at(NodeKey{0, 18}).objects == std::vector<std::string>{"person"});

    // boundary: conf exactly at the threshold is also dropped
    records.clear();
    for (int i = 0; i < 12; ++i) {
        records.push_back(make_record("2024-03-04", 540 + i, "office", "working",
                                      {{"tv", 0.5}}));
    }
    CHECK(build_nodes(records, IngestConfig{}).nodes.at(NodeKey{0, 18}).objects.empty());
}

TEST_CASE("duplicate detections in one image count once") {
    std::vector<ConceptRecord> records;
    for (int i = 0; i < 11; ++i) {
        records.push_back(make_record("2024-03-04", 540 + i, "office", "working",
                                      {{"person", 0.9}, {"person", 0.8}}));
    }
    const NodeGrid grid = build_nodes(records, IngestConfig{});
    // 11 distinct images > 10, despite 22 detections
    CHECK(grid.nodes.at(NodeKey{0, 18}).objects == std::vector<std::string>{"person"});
}

TEST_CASE("modal labels break ties lexicographically and ignore record order") {
    std::vector<ConceptRecord> records;
    for (int i = 0; i < 6; ++i) records.push_back(make_record("2024-03-04", 540 + i, "office", "b"));
    for (int i = 0; i < 6; ++i) records.push_back(make_record("2024-03-04", 546 + i, "kitchen", "a"));
    const NodeGrid grid = build_nodes(records, IngestConfig{});
    CHECK(grid.nodes.at(NodeKey{0, 18}).scene == "kitchen"); // 6 vs 6, kitchen < office
    CHECK(grid.nodes.at(NodeKey{0, 18}).activity == "a");

    std::mt19937 shuffler(7);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(records.begin(), records.end(), shuffler);
        const NodeGrid again = build_nodes(records, IngestConfig{});
        CHECK(again.nodes.at(NodeKey{0, 18}).scene == "kitchen");
        CHECK(again.nodes.at(NodeKey{0, 18}).activity == "a");
    }
}

TEST_CASE("slot assignment and day indexing") {
    std::vector<ConceptRecord> records;
    records.push_back(make_record("2024-03-10", 0, "s", "a"));       // slot 0
    records.push_back(make_record("2024-03-10", 29, "s", "a"));      // slot 0
    records.push_back(make_record("2024-03-10", 30, "s", "a"));      // slot 1
    records.push_back(make_record("2024-03-04", 1439, "s", "a"));    // earlier day, slot 47
    const NodeGrid grid = build_nodes(records, IngestConfig{});
    // days sorted chronologically; the gap does not create rows
    REQUIRE(grid.days == std::vector<std::string>{"2024-03-04", "2024-03-10"});
    CHECK(grid.nodes.contains(NodeKey{0, 47}));
    CHECK(grid.nodes.contains(NodeKey{1, 0}));
    CHECK(grid.nodes.contains(NodeKey{1, 1}));
    CHECK(grid.nodes.at(NodeKey{1, 0}).image_count == 2);

    // slot index re-derivable from any member timestamp
    for (const auto& [key, node] : grid.nodes) {
        CHECK(node.first_minute / grid.slot_minutes == key.slot);
        CHECK(node.last_minute / grid.slot_minutes == key.slot);
    }
}

TEST_CASE("min_images_per_slot gates node creation") {
    std::vector<ConceptRecord> records;
    records.push_back(make_record("2024-03-04", 100, "s", "a"));
    IngestConfig cfg;
    cfg.min_images_per_slot = 2;
    CHECK_THROWS_AS(build_nodes(records, cfg), NoNodes);
    records.push_back(make_record("2024-03-04", 101, "s", "a"));
    CHECK(build_nodes(records, cfg).nodes.size() == 1);
}

TEST_CASE("raising object_min_count never adds objects") {
    std::vector<ConceptRecord> records;
    for (int i = 0; i < 15; ++i) {
        std::vector<ObjectDetection> objects = {{"person", 0.9}};
        if (i < 12) objects.push_back({"cup", 0.9});
        records.push_back(make_record("2024-03-04", 540 + i, "office", "working", objects));
    }
    IngestConfig cfg;
    std::vector<std::string> previous;
    bool first = true;
    for (int count = 0; count <= 16; ++count) {
        cfg.object_min_count = count;
        const auto objects = build_nodes(records, cfg).nodes.at(NodeKey{0, 18}).objects;
        if (!first) {
            for (const auto& label : objects) {
                CHECK(std::find(previous.begin(), previous.end(), label) != previous.end());
            }
        }
        previous = objects;
        first = false;
    }
}

TEST_CASE("mixed users are rejected") {
    std::vector<ConceptRecord> records = {make_record("2024-03-04", 100, "s", "a")};
    records.push_back(make_record("2024-03-04", 101, "s", "a"));
    records.back().user_id = "u2";
    CHECK_THROWS_AS(build_nodes(records, IngestConfig{}), std::invalid_argument);
}
