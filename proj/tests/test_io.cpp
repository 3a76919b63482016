#include <doctest.h>

#include "routine/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace routine;
namespace fs = std::filesystem;

namespace {

PatternSet sample_set() {
    PatternSet ps;
    Pattern p;
    p.id = 0;
    p.nodes = {NodeKey{0, 5}, NodeKey{1, 5}, NodeKey{2, 6}};
    p.seed = {NodeKey{0, 5}, NodeKey{1, 5}};
    p.threshold_used = 0.004;
    p.cut_index = 7;
    p.labels.scene = "office";
    p.labels.activity = "working";
    p.labels.objects = {{"laptop", 3}, {"mug", 1}};
    ps.patterns.push_back(p);
    Pattern q;
    q.id = 1;
    q.nodes = {NodeKey{0, 20}, NodeKey{2, 20}};
    q.seed = {NodeKey{0, 20}, NodeKey{2, 20}};
    q.threshold_used = 0.004;
    q.cut_index = -1;
    q.labels.scene = "beach";
    q.labels.activity = "swimming";
    ps.patterns.push_back(q);
    ps.unassigned = {NodeKey{1, 30}};
    return ps;
}

GridMeta sample_meta() { return GridMeta{"u1", 3, 48, 30}; }

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("routine_io_test_" + name);
}

} // namespace

TEST_CASE("pattern set JSON round trip") {
    const std::string json = pattern_set_json(sample_set(), sample_meta(), "greedy-variance");
    const fs::path path = temp_file("patterns.json");
    write_text_file(path, json);

    const LoadedPatternSet loaded = load_pattern_set(path);
    CHECK(loaded.method == "greedy-variance");
    CHECK(loaded.meta.user_id == "u1");
    CHECK(loaded.meta.n_days == 3);
    CHECK(loaded.meta.slots_per_day == 48);
    REQUIRE(loaded.set.patterns.size() == 2);
    CHECK(loaded.set.patterns[0].nodes == sample_set().patterns[0].nodes);
    CHECK(loaded.set.patterns[0].cut_index == 7);
    CHECK(loaded.set.patterns[0].labels.objects ==
          sample_set().patterns[0].labels.objects);
    CHECK(loaded.set.unassigned == sample_set().unassigned);
    fs::remove(path);
}

TEST_CASE("histogram csv lists days per pattern") {
    std::ostringstream out;
    write_histogram_csv(out, sample_set());
    CHECK(out.str() == "pattern_id,days\n0,3\n1,2\n");

    std::ostringstream empty;
    write_histogram_csv(empty, PatternSet{});
    CHECK(empty.str() == "pattern_id,days\n");
}

TEST_CASE("timeline svg is deterministic and palette-indexed") {
    const std::string a = timeline_svg(sample_set(), sample_meta());
    const std::string b = timeline_svg(sample_set(), sample_meta());
    CHECK(a == b);
    CHECK(a.find("<svg") == 0);
    // pattern 13 shares the palette slot of pattern 1
    PatternSet wrapped = sample_set();
    wrapped.patterns[1].id = 13;
    const std::string c = timeline_svg(wrapped, sample_meta());
    const auto fill_of = [](const std::string& svg, const std::string& marker) {
        const auto at = svg.find(marker);
        REQUIRE(at != std::string::npos);
        const auto fill = svg.rfind("fill=\"", at);
        return svg.substr(fill + 6, 7);
    };
    CHECK(fill_of(a, "pattern 1 ") == fill_of(c, "pattern 13 "));
}

TEST_CASE("sweep and coords csv formatting") {
    std::ostringstream sweep;
    write_sweep_csv(sweep, {{0.0, 1.5}, {0.002, 1.25}});
    CHECK(sweep.str() == "T,sc\n0,1.5\n0.002,1.25\n");

    Embedding e;
    e.node_ids = {NodeKey{0, 1}, NodeKey{0, 2}};
    e.coords = Eigen::MatrixXd::Zero(2, 2);
    e.coords(0, 0) = 1.25;
    e.coords(1, 1) = -0.5;
    std::ostringstream coords;
    write_coords_csv(coords, e);
    CHECK(coords.str() == "day_index,slot_index,x,y\n0,1,1.25,0\n0,2,0,-0.5\n");
}

TEST_CASE("distance csv includes the node-key header") {
    DistanceMatrix D({NodeKey{0, 3}, NodeKey{1, 4}}, {0.0, 1.5, 1.5, 0.0});
    std::ostringstream out;
    write_distance_csv(out, D);
    CHECK(out.str() == "node,0:3,1:4\n0:3,0,1.5\n1:4,1.5,0\n");
}

TEST_CASE("ground truth round trip") {
    GroundTruth truth;
    truth.n_days = 2;
    truth.slots_per_day = 10;
    truth.assignments[NodeKey{0, 1}] = 0;
    truth.assignments[NodeKey{1, 9}] = -1;
    const fs::path path = temp_file("truth.json");
    write_text_file(path, ground_truth_json(truth));
    const GroundTruth loaded = load_ground_truth(path);
    CHECK(loaded.n_days == 2);
    CHECK(loaded.slots_per_day == 10);
    CHECK(loaded.assignments == truth.assignments);
    fs::remove(path);
}

TEST_CASE("synth spec loads with defaults for missing keys") {
    const fs::path path = temp_file("spec.json");
    write_text_file(path, R"({
        "n_days": 4,
        "background_scenes": ["a"],
        "background_activities": ["b"],
        "background_objects": ["c"],
        "planted": [{"slot_lo": 2, "slot_hi": 3, "days": [0, 1],
                     "scene": "s", "activity": "w", "objects": ["x"]}]
    })");
    const SynthSpec spec = load_synth_spec(path);
    CHECK(spec.n_days == 4);
    CHECK(spec.slots_per_day == 48); // default
    CHECK(spec.frq == 0.5);          // default
    REQUIRE(spec.planted.size() == 1);
    CHECK(spec.planted[0].images_per_slot == 12);
    fs::remove(path);
}

TEST_CASE("manifest records config and outputs") {
    RunManifest manifest("mine");
    manifest.add_input("in.jsonl");
    manifest.set_config("sigma", 3.0);
    manifest.set_config("min-pattern-days", 2);
    manifest.add_output("patterns.json");
    manifest.set_timing("total", 12.5);
    const std::string json = manifest.to_json();
    CHECK(json.find("\"command\": \"mine\"") != std::string::npos);
    CHECK(json.find("\"sigma\": \"3\"") != std::string::npos);
    CHECK(json.find("patterns.json") != std::string::npos);
    CHECK(json.find("\"version\": \"0.1.0\"") != std::string::npos);
}

TEST_CASE("score report json carries the sweep table") {
    ScoreReport report;
    report.global_silhouette = 0.25;
    report.per_pattern_silhouette = {{0, 0.5}};
    report.t_rpr = 1.25;
    report.sc = 1.5;
    report.threshold_used = 0.004;
    report.sweep = {{0.0, 1.0}, {0.002, 1.5}};
    const std::string json = score_report_json(report);
    CHECK(json.find("\"sc\": 1.5") != std::string::npos);
    CHECK(json.find("\"sweep\"") != std::string::npos);
    CHECK(json.find("\"T\": 0.002") != std::string::npos);
}

TEST_CASE("concept log writer emits parseable lines") {
    ConceptRecord r;
    r.user_id = "u";
    r.day = "2024-03-04";
    r.minute_of_day = 550;
    r.scene = "office";
    r.activity = "working";
    r.objects = {{"laptop", 0.75}};
    std::ostringstream out;
    write_concept_log(out, {r});
    std::istringstream in(out.str());
    const auto parsed = parse_concept_log(in);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].minute_of_day == 550);
    CHECK(parsed[0].objects[0].confidence == 0.75);
}

TEST_CASE("node grid export is one flat record per node") {
    NodeGrid grid;
    grid.user_id = "u";
    grid.slot_minutes = 30;
    grid.days = {"2024-03-04"};
    TimeSlotNode n;
    n.day_index = 0;
    n.slot_index = 18;
    n.scene = "office";
    n.activity = "working";
    n.objects = {"laptop", "person"};
    n.image_count = 12;
    grid.nodes.emplace(n.key(), n);
    std::ostringstream out;
    write_node_grid(out, grid);
    CHECK(out.str() ==
          "{\"day_index\":0,\"slot_index\":18,\"scene\":\"office\","
          "\"activity\":\"working\",\"objects\":[\"laptop\",\"person\"],"
          "\"image_count\":12}\n");
}
