#include "routine/io.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

namespace {

using namespace routine;
namespace fs = std::filesystem;

// All tunables with their built-in defaults. A config file (flat
// key=value lines, keys matching the long flag names) overrides these,
// and explicit CLI flags override the config file.
struct Defaults {
    int slot_minutes = 30;
    int min_images_per_slot = 1;
    int object_min_count = 10;
    double object_conf_min = 0.5;
    double frq = 0.5;
    double sigma = 3.0;
    double K = std::numeric_limits<double>::infinity();
    std::string sweep = "0:0.05:0.002";
    int min_pattern_nodes = 2;
    int min_pattern_days = 2;
    int max_patterns = 0;
    double eps = 0.5;
    int min_pts = 3;
    double time_weight = 1.0;
    std::uint64_t seed = 1;
};

std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_config(Defaults& d, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        try {
            if (key == "slot-minutes") d.slot_minutes = std::stoi(value);
            else if (key == "min-images-per-slot") d.min_images_per_slot = std::stoi(value);
            else if (key == "object-min-count") d.object_min_count = std::stoi(value);
            else if (key == "object-conf-min") d.object_conf_min = std::stod(value);
            else if (key == "frq") d.frq = std::stod(value);
            else if (key == "sigma") d.sigma = std::stod(value);
            else if (key == "K") d.K = std::stod(value);
            else if (key == "sweep") d.sweep = value;
            else if (key == "min-pattern-nodes") d.min_pattern_nodes = std::stoi(value);
            else if (key == "min-pattern-days") d.min_pattern_days = std::stoi(value);
            else if (key == "max-patterns") d.max_patterns = std::stoi(value);
            else if (key == "eps") d.eps = std::stod(value);
            else if (key == "min-pts") d.min_pts = std::stoi(value);
            else if (key == "time-weight") d.time_weight = std::stod(value);
            else if (key == "seed") d.seed = std::stoull(value);
            else throw std::runtime_error("unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config key '" + key + "': bad value '" + value + "'");
        }
    }
}

void parse_sweep_range(const std::string& text, MinerConfig& cfg) {
    std::istringstream in(text);
    std::string lo, hi, step;
    if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') || !std::getline(in, step)) {
        throw std::runtime_error("bad sweep range '" + text + "', expected lo:hi:step");
    }
    cfg.sweep_lo = std::stod(lo);
    cfg.sweep_hi = std::stod(hi);
    cfg.sweep_step = std::stod(step);
}

NodeGrid ingest(const fs::path& input, const IngestConfig& cfg) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open input '" + input.string() + "'");
    return build_nodes(parse_concept_log(in), cfg);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
        .count();
}

struct PipelineArgs {
    std::string input;
    std::string output_dir;
    double threshold = std::numeric_limits<double>::quiet_NaN(); // NaN = sweep
    bool dump_distances = false;
    bool dump_coords = false;
    bool dump_nodes = false;
};

void write_manifest(RunManifest& manifest, const fs::path& dir, const std::string& command) {
    const fs::path path = dir / (command + "-manifest.json");
    manifest.add_output(path.string());
    write_text_file(path, manifest.to_json());
}

void record_common_config(RunManifest& manifest, const Defaults& d) {
    manifest.set_config("slot-minutes", d.slot_minutes);
    manifest.set_config("min-images-per-slot", d.min_images_per_slot);
    manifest.set_config("object-min-count", d.object_min_count);
    manifest.set_config("object-conf-min", d.object_conf_min);
    manifest.set_config("frq", d.frq);
}

int run_mine(const PipelineArgs& args, const Defaults& d, bool force_sweep,
             const std::string& command) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(args.output_dir);
    const fs::path out_dir(args.output_dir);

    IngestConfig ingest_cfg{d.slot_minutes, d.min_images_per_slot, d.object_min_count,
                            d.object_conf_min, d.frq};
    MinerConfig miner_cfg;
    miner_cfg.variance_cap = d.K;
    miner_cfg.sigma = d.sigma;
    miner_cfg.min_pattern_nodes = d.min_pattern_nodes;
    miner_cfg.min_pattern_days = d.min_pattern_days;
    miner_cfg.max_patterns = d.max_patterns;
    parse_sweep_range(d.sweep, miner_cfg);

    RunManifest manifest(command);
    manifest.add_input(args.input);
    record_common_config(manifest, d);
    manifest.set_config("sigma", d.sigma);
    manifest.set_config("K", d.K);
    manifest.set_config("min-pattern-nodes", d.min_pattern_nodes);
    manifest.set_config("min-pattern-days", d.min_pattern_days);
    manifest.set_config("max-patterns", d.max_patterns);

    const NodeGrid grid = ingest(args.input, ingest_cfg);
    const DistanceMatrix D = distance_matrix(grid);
    const Embedding embedding = embed(D);
    const auto t_pipeline = std::chrono::steady_clock::now();

    const CutScorer scorer = make_cut_scorer(grid, D, d.frq);
    const bool sweeping = force_sweep || std::isnan(args.threshold);
    ScoreReport report;
    if (sweeping) {
        const SweepResult sweep = sweep_threshold(grid, D, embedding, miner_cfg, d.frq);
        miner_cfg.threshold = sweep.best_threshold;
        report.sweep = sweep.table;
        manifest.set_config("sweep", d.sweep);
        manifest.set_config("threshold", sweep.best_threshold);
    } else {
        miner_cfg.threshold = args.threshold;
        manifest.set_config("threshold", args.threshold);
    }
    const PatternSet patterns = mine(grid, D, embedding, miner_cfg, scorer);
    const auto t_mine = std::chrono::steady_clock::now();

    const auto sweep_table = report.sweep;
    report = score_pattern_set(grid, D, patterns, d.frq);
    report.sweep = sweep_table;
    report.threshold_used = *miner_cfg.threshold;

    const fs::path patterns_path = out_dir / "patterns.json";
    write_text_file(patterns_path, pattern_set_json(patterns, grid_meta(grid), "greedy-variance"));
    manifest.add_output(patterns_path.string());

    const fs::path scores_path = out_dir / "scores.json";
    write_text_file(scores_path, score_report_json(report));
    manifest.add_output(scores_path.string());

    if (sweeping) {
        std::ostringstream csv;
        write_sweep_csv(csv, report.sweep);
        const fs::path sweep_path = out_dir / "sweep.csv";
        write_text_file(sweep_path, csv.str());
        manifest.add_output(sweep_path.string());
    }
    if (args.dump_distances) {
        std::ostringstream csv;
        write_distance_csv(csv, D);
        const fs::path path = out_dir / "distances.csv";
        write_text_file(path, csv.str());
        manifest.add_output(path.string());
    }
    if (args.dump_coords) {
        std::ostringstream csv;
        write_coords_csv(csv, embedding);
        const fs::path path = out_dir / "coords.csv";
        write_text_file(path, csv.str());
        manifest.add_output(path.string());
    }
    if (args.dump_nodes) {
        std::ostringstream lines;
        write_node_grid(lines, grid);
        const fs::path path = out_dir / "nodes.jsonl";
        write_text_file(path, lines.str());
        manifest.add_output(path.string());
    }

    manifest.set_timing("ingest_and_embed", elapsed_ms(t0) - elapsed_ms(t_pipeline));
    manifest.set_timing("mine", elapsed_ms(t_pipeline) - elapsed_ms(t_mine));
    manifest.set_timing("total", elapsed_ms(t0));
    write_manifest(manifest, out_dir, command);

    std::cout << "patterns: " << patterns.patterns.size() << "\n";
    std::cout << "threshold: " << *miner_cfg.threshold << "\n";
    std::cout << "sc: " << report.sc << "\n";
    return 0;
}

int run_baseline(const std::string& input, const std::string& output_dir, const Defaults& d) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(output_dir);
    const fs::path out_dir(output_dir);

    IngestConfig ingest_cfg{d.slot_minutes, d.min_images_per_slot, d.object_min_count,
                            d.object_conf_min, d.frq};
    BaselineConfig cfg{d.eps, d.min_pts, d.time_weight};

    RunManifest manifest("baseline");
    manifest.add_input(input);
    record_common_config(manifest, d);
    manifest.set_config("eps", d.eps);
    manifest.set_config("min-pts", d.min_pts);
    manifest.set_config("time-weight", d.time_weight);

    const NodeGrid grid = ingest(input, ingest_cfg);
    const PatternSet patterns = baseline_patterns(grid, cfg);
    const DistanceMatrix D = distance_matrix(grid);
    const ScoreReport report = score_pattern_set(grid, D, patterns, d.frq);

    const fs::path patterns_path = out_dir / "patterns.json";
    write_text_file(patterns_path, pattern_set_json(patterns, grid_meta(grid), "dbscan-baseline"));
    manifest.add_output(patterns_path.string());
    const fs::path scores_path = out_dir / "scores.json";
    write_text_file(scores_path, score_report_json(report));
    manifest.add_output(scores_path.string());

    manifest.set_timing("total", elapsed_ms(t0));
    write_manifest(manifest, out_dir, "baseline");

    std::cout << "patterns: " << patterns.patterns.size() << "\n";
    std::cout << "sc: " << report.sc << "\n";
    return 0;
}

int run_synth(const std::string& spec_path, const std::string& output_dir,
              const std::uint64_t* seed_override) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(output_dir);
    const fs::path out_dir(output_dir);

    SynthSpec spec = load_synth_spec(spec_path);
    if (seed_override) spec.seed = *seed_override;
    const SynthResult synth = generate(spec);

    RunManifest manifest("synth");
    manifest.add_input(spec_path);
    manifest.set_config("seed", static_cast<int>(spec.seed));
    manifest.set_config("n-days", spec.n_days);
    manifest.set_config("noise-rate", spec.noise_rate);

    std::ostringstream log;
    write_concept_log(log, synth.records);
    const fs::path log_path = out_dir / "log.jsonl";
    write_text_file(log_path, log.str());
    manifest.add_output(log_path.string());

    const fs::path truth_path = out_dir / "truth.json";
    write_text_file(truth_path, ground_truth_json(synth.truth));
    manifest.add_output(truth_path.string());

    manifest.set_timing("total", elapsed_ms(t0));
    write_manifest(manifest, out_dir, "synth");

    std::cout << "records: " << synth.records.size() << "\n";
    return 0;
}

int run_eval(const std::string& found_path, const std::string& truth_path,
             const std::string& output) {
    const LoadedPatternSet found = load_pattern_set(found_path);
    const GroundTruth truth = load_ground_truth(truth_path);
    const EvalReport report = evaluate(found.set, truth);
    if (!output.empty()) {
        write_text_file(output, eval_report_json(report));
    }
    std::cout << "macro_f1: " << report.macro_f1 << "\n";
    return 0;
}

int run_histogram(const std::string& patterns_path, const std::string& output_dir, bool svg) {
    fs::create_directories(output_dir);
    const fs::path out_dir(output_dir);
    const LoadedPatternSet loaded = load_pattern_set(patterns_path);

    RunManifest manifest("histogram");
    manifest.add_input(patterns_path);

    std::ostringstream csv;
    write_histogram_csv(csv, loaded.set);
    const fs::path csv_path = out_dir / "histogram.csv";
    write_text_file(csv_path, csv.str());
    manifest.add_output(csv_path.string());

    if (svg) {
        const fs::path svg_path = out_dir / "histogram.svg";
        write_text_file(svg_path, histogram_svg(loaded.set));
        manifest.add_output(svg_path.string());
    }
    write_manifest(manifest, out_dir, "histogram");
    std::cout << "patterns: " << loaded.set.patterns.size() << "\n";
    return 0;
}

int run_timeline(const std::string& patterns_path, const std::string& output_dir) {
    fs::create_directories(output_dir);
    const fs::path out_dir(output_dir);
    const LoadedPatternSet loaded = load_pattern_set(patterns_path);

    RunManifest manifest("timeline");
    manifest.add_input(patterns_path);
    const fs::path svg_path = out_dir / "timeline.svg";
    write_text_file(svg_path, timeline_svg(loaded.set, loaded.meta));
    manifest.add_output(svg_path.string());
    write_manifest(manifest, out_dir, "timeline");
    std::cout << "patterns: " << loaded.set.patterns.size() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recurrent behavioural pattern discovery over concept-labelled event streams"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path,
                   "flat key=value config file (default: $ROUTINE_MINER_CONFIG)");

    // config file first, CLI flags afterwards, so flags win
    Defaults d;
    try {
        std::string pre_config;
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc) pre_config = argv[i + 1];
            else if (arg.rfind("--config=", 0) == 0) pre_config = arg.substr(9);
        }
        if (pre_config.empty()) {
            if (const char* env = std::getenv("ROUTINE_MINER_CONFIG")) pre_config = env;
        }
        if (!pre_config.empty()) apply_config(d, read_config_file(pre_config));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    PipelineArgs pipeline;
    std::string output_dir = "out";
    std::string spec_path, found_path, truth_path, eval_output, patterns_path;
    bool svg = false;
    bool seed_given = false;

    auto add_ingest_flags = [&](CLI::App* cmd) {
        cmd->add_option("--slot-minutes", d.slot_minutes, "time-slot width in minutes");
        cmd->add_option("--min-images-per-slot", d.min_images_per_slot,
                        "records required for a slot to form a node");
        cmd->add_option("--object-min-count", d.object_min_count,
                        "object kept when seen in more than this many images");
        cmd->add_option("--object-conf-min", d.object_conf_min,
                        "minimum detection confidence (exclusive)");
        cmd->add_option("--frq", d.frq, "camera frame rate, frames per minute");
    };
    auto add_miner_flags = [&](CLI::App* cmd) {
        cmd->add_option("--sigma", d.sigma, "Gaussian smoothing width for the variance trace");
        cmd->add_option("--K", d.K, "variance cap for greedy growth");
        cmd->add_option("--min-pattern-nodes", d.min_pattern_nodes, "pattern size gate");
        cmd->add_option("--min-pattern-days", d.min_pattern_days, "pattern day-coverage gate");
        cmd->add_option("--max-patterns", d.max_patterns, "stop after this many patterns (0 = all)");
        cmd->add_option("--sweep", d.sweep, "threshold sweep grid lo:hi:step");
        cmd->add_flag("--dump-distances", pipeline.dump_distances, "write distances.csv");
        cmd->add_flag("--dump-coords", pipeline.dump_coords, "write coords.csv");
        cmd->add_flag("--dump-nodes", pipeline.dump_nodes, "write the node grid as nodes.jsonl");
    };

    CLI::App* mine_cmd = app.add_subcommand("mine", "discover patterns in a concept log");
    mine_cmd->add_option("--input", pipeline.input, "concept log (JSONL)")->required();
    mine_cmd->add_option("--output-dir", output_dir, "output directory");
    mine_cmd->add_option("--threshold", pipeline.threshold,
                         "first-derivative threshold; omit to sweep");
    add_ingest_flags(mine_cmd);
    add_miner_flags(mine_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "mine with a forced threshold sweep");
    sweep_cmd->add_option("--input", pipeline.input, "concept log (JSONL)")->required();
    sweep_cmd->add_option("--output-dir", output_dir, "output directory");
    add_ingest_flags(sweep_cmd);
    add_miner_flags(sweep_cmd);

    CLI::App* baseline_cmd = app.add_subcommand("baseline", "DBSCAN comparison pipeline");
    baseline_cmd->add_option("--input", pipeline.input, "concept log (JSONL)")->required();
    baseline_cmd->add_option("--output-dir", output_dir, "output directory");
    baseline_cmd->add_option("--eps", d.eps, "DBSCAN radius");
    baseline_cmd->add_option("--min-pts", d.min_pts, "DBSCAN core threshold");
    baseline_cmd->add_option("--time-weight", d.time_weight, "weight of the time feature");
    add_ingest_flags(baseline_cmd);

    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic concept log");
    synth_cmd->add_option("--spec", spec_path, "synthetic spec (JSON)")->required();
    synth_cmd->add_option("--output-dir", output_dir, "output directory");
    std::uint64_t seed_value = 1;
    synth_cmd->add_option("--seed", seed_value, "override the spec's RNG seed")
        ->each([&](const std::string&) { seed_given = true; });

    CLI::App* eval_cmd = app.add_subcommand("eval", "score found patterns against ground truth");
    eval_cmd->add_option("--found", found_path, "patterns.json")->required();
    eval_cmd->add_option("--truth", truth_path, "truth.json")->required();
    eval_cmd->add_option("--output", eval_output, "write eval report JSON here");

    CLI::App* histogram_cmd =
        app.add_subcommand("histogram", "days-of-occurrence per pattern (CSV, optional SVG)");
    histogram_cmd->add_option("--patterns", patterns_path, "patterns.json")->required();
    histogram_cmd->add_option("--output-dir", output_dir, "output directory");
    histogram_cmd->add_flag("--svg", svg, "also write a bar chart SVG");

    CLI::App* timeline_cmd = app.add_subcommand("timeline", "pattern mosaic SVG (days x slots)");
    timeline_cmd->add_option("--patterns", patterns_path, "patterns.json")->required();
    timeline_cmd->add_option("--output-dir", output_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mine_cmd->parsed()) {
            pipeline.output_dir = output_dir;
            const bool sweeping = mine_cmd->count("--threshold") == 0;
            if (sweeping) pipeline.threshold = std::numeric_limits<double>::quiet_NaN();
            return run_mine(pipeline, d, false, "mine");
        }
        if (sweep_cmd->parsed()) {
            pipeline.output_dir = output_dir;
            pipeline.threshold = std::numeric_limits<double>::quiet_NaN();
            return run_mine(pipeline, d, true, "sweep");
        }
        if (baseline_cmd->parsed()) return run_baseline(pipeline.input, output_dir, d);
        if (synth_cmd->parsed()) {
            return run_synth(spec_path, output_dir, seed_given ? &seed_value : nullptr);
        }
        if (eval_cmd->parsed()) return run_eval(found_path, truth_path, eval_output);
        if (histogram_cmd->parsed()) return run_histogram(patterns_path, output_dir, svg);
        if (timeline_cmd->parsed()) return run_timeline(patterns_path, output_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
