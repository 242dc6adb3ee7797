// terrastep: synthetic footstep generation, terrain classification, and
// adaptive-foot control in one binary. Run `terrastep --help` for the
// subcommand list; exit codes are 0 (ok), 1 (usage), 2 (data/model error).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "terrastep/control.hpp"
#include "terrastep/eval.hpp"
#include "terrastep/features.hpp"
#include "terrastep/io.hpp"
#include "terrastep/model.hpp"
#include "terrastep/pca.hpp"
#include "terrastep/pipeline.hpp"
#include "terrastep/preprocess.hpp"
#include "terrastep/split.hpp"
#include "terrastep/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace terrastep;

namespace {

struct GenOptions {
    int steps = 200;
    std::uint64_t seed = 42;
    std::string terrains_path;
    std::string out_dir = "runs";
    StepCycleSpec cycle;
};

struct ExtractOptions {
    std::string runs_dir = "runs";
    std::string out_path = "features.csv";
    std::string bands_path;
    SegmentationParams seg;
};

struct TrainOptions {
    std::string data_path = "features.csv";
    std::string algo = "rf";
    std::uint64_t seed = 42;
    double test_fraction = 0.2;
    std::string out_path = "model.json";
    std::string bands_path;
};

struct EvalOptions {
    std::string model_path = "model.json";
    std::string data_path = "features.csv";
    std::string report_path = "report.json";
    std::string confusion_path = "confusion.csv";
    bool full = false;
};

struct AblateOptions {
    std::string data_path = "features.csv";
    std::string algo = "rf";
    std::uint64_t seed = 42;
    double test_fraction = 0.2;
    std::string preset;
    std::vector<std::string> sensors;
    std::string out_path = "ablation.json";
};

struct PcaOptions {
    std::string data_path = "features.csv";
    int dims = 3;
    std::string out_path = "pca.csv";
};

struct StreamOptions {
    std::string run_dir;
    std::string model_path;
    std::string out_path;
    std::string actuation_log = "actuation.jsonl";
    bool realtime = false;
    bool threaded = false;
    double window_s = 8.0;
    SegmentationParams seg;
};

struct BenchOptions {
    std::vector<std::string> models;
    std::string run_dir;
    int steps = 10;
    std::string out_path = "bench.json";
    SegmentationParams seg;
};

void add_seg_options(CLI::App* cmd, SegmentationParams& seg) {
    cmd->add_option("--contact-threshold-frac", seg.contact_threshold_frac,
                    "Contact threshold as a fraction of summed-tactile peak-to-peak")
        ->capture_default_str();
    cmd->add_option("--min-step-gap-s", seg.min_step_gap_s,
                    "Contacts with peaks closer than this merge into one step")
        ->capture_default_str();
    cmd->add_option("--min-contact-s", seg.min_contact_s, "Minimum contact duration")
        ->capture_default_str();
}

SignatureTable signatures_from(const std::string& path) {
    if (path.empty()) return default_signatures();
    SignatureTable table = load_signatures(path);
    for (TerrainClass t : all_terrains())
        if (!table.contains(t)) table[t] = default_signatures().at(t);
    return table;
}

SpectralBandSpec bands_from(const std::string& path) {
    return path.empty() ? SpectralBandSpec::log_bands(18000.0) : load_band_spec(path);
}

int cmd_gen(const GenOptions& opt) {
    const SignatureTable table = signatures_from(opt.terrains_path);
    fs::create_directories(opt.out_dir);
    // the effective table ships next to the runs so users can edit and rerun
    save_signatures(table, (fs::path(opt.out_dir) / "terrains.json").string());
    for_each_corpus_run(table, opt.cycle, opt.steps, opt.seed, [&](RecordingRun&& run) {
        const fs::path dir = fs::path(opt.out_dir) / std::string(terrain_name(*run.terrain));
        save_run(run, dir.string());
        std::cout << run.run_id << ": " << run.truth_boundaries->size() << " steps, "
                  << run.duration_s() << " s -> " << dir.string() << '\n';
    });
    return 0;
}

int cmd_extract(const ExtractOptions& opt) {
    const SpectralBandSpec bands = bands_from(opt.bands_path);
    std::vector<std::string> dirs;
    for (const auto& entry : fs::directory_iterator(opt.runs_dir))
        if (entry.is_directory()) dirs.push_back(entry.path().string());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw SchemaError("no run directories under " + opt.runs_dir);

    Dataset ds;
    for (const std::string& dir : dirs) {
        const RecordingRun run = load_run(dir);
        if (!run.terrain)
            throw SchemaError(dir + ": UNKNOWN terrain, cannot build a labeled dataset");
        const auto segments = segment(run, opt.seg);
        for (const FootstepSegment& seg : segments) {
            FeatureVector fv = extract_features(run, seg, bands);
            fv.label = run.terrain;
            ds.rows.push_back(std::move(fv));
        }
        std::cout << run.run_id << ": " << segments.size() << " footsteps\n";
    }
    save_dataset(ds, opt.out_path);
    std::cout << ds.size() << " feature rows -> " << opt.out_path << '\n';
    return 0;
}

int cmd_train(const TrainOptions& opt) {
    const auto algo = parse_algo(opt.algo);
    if (!algo) {
        if (opt.algo == "cnn")
            throw CLI::ValidationError("--algo",
                                       "cnn is out of scope for this toolkit; choose one of "
                                       "knn/svm/rf/gb/ann");
        throw CLI::ValidationError("--algo", "unknown algorithm '" + opt.algo + "'");
    }
    const Dataset ds = load_dataset(opt.data_path);
    Dataset train = ds;
    if (opt.test_fraction > 0.0) {
        auto [tr, te] = split_train_test(ds, opt.test_fraction, opt.seed);
        train = std::move(tr);
        std::cout << "split: " << train.size() << " train / " << te.size() << " test\n";
    }
    ModelArtifact model = fit_model(*algo, train, opt.seed, bands_from(opt.bands_path));
    model.test_fraction = opt.test_fraction;
    save_model(model, opt.out_path);
    std::cout << algo_name(*algo) << " model (seed " << opt.seed << ") -> " << opt.out_path
              << '\n';
    return 0;
}

void print_report(const EvalReport& report) {
    for (int c = 0; c < kNumTerrains; ++c)
        std::cout << "  " << terrain_name(static_cast<TerrainClass>(c)) << ": "
                  << report.per_class_accuracy[c] << "%\n";
    std::cout << "overall: " << report.overall_accuracy << "%  (predict mean "
              << report.latency.mean_ms << " ms, p95 " << report.latency.p95_ms << " ms)\n";
}

int cmd_eval(const EvalOptions& opt) {
    const ModelArtifact model = load_model(opt.model_path);
    const Dataset ds = load_dataset(opt.data_path);
    Dataset test = ds;
    if (!opt.full && model.test_fraction > 0.0) {
        auto [tr, te] = split_train_test(ds, model.test_fraction, model.train_seed);
        test = std::move(te);
        std::cout << "evaluating the model's held-out split: " << test.size() << " rows\n";
    }
    const EvalReport report = evaluate(model, test);
    save_report(report, model.algo, opt.report_path);
    save_confusion_csv(report, opt.confusion_path);
    print_report(report);
    std::cout << "report -> " << opt.report_path << ", confusion -> " << opt.confusion_path
              << '\n';
    return 0;
}

int cmd_ablate(const AblateOptions& opt) {
    const auto algo = parse_algo(opt.algo);
    if (!algo) throw CLI::ValidationError("--algo", "unknown algorithm '" + opt.algo + "'");
    const Dataset ds = load_dataset(opt.data_path);
    auto [train, test] = split_train_test(ds, opt.test_fraction, opt.seed);

    std::vector<std::pair<std::string, std::set<Sensor>>> combos;
    if (!opt.preset.empty()) {
        if (opt.preset != "table4")
            throw CLI::ValidationError("--preset", "unknown preset '" + opt.preset + "'");
        combos = ablation_preset();
    } else if (!opt.sensors.empty()) {
        std::set<Sensor> subset;
        std::string name;
        for (const std::string& s : opt.sensors) {
            const auto sensor = parse_sensor(s);
            if (!sensor) throw CLI::ValidationError("--sensors", "unknown sensor '" + s + "'");
            subset.insert(*sensor);
            name += (name.empty() ? "" : " + ") + std::string(sensor_name(*sensor));
        }
        combos.emplace_back(name, subset);
    } else {
        throw CLI::ValidationError("ablate", "need --preset table4 or --sensors");
    }

    json out;
    out["algo"] = std::string(algo_name(*algo));
    json rows = json::array();
    for (const auto& [name, subset] : combos) {
        const EvalReport report = ablate(train, test, subset, *algo, opt.seed);
        std::cout << name << ": " << report.overall_accuracy << "%\n";
        rows.push_back(json{{"sensors", name}, {"overall_accuracy", report.overall_accuracy}});
    }
    out["rows"] = rows;
    std::ofstream f(opt.out_path, std::ios::binary);
    if (!f) throw SchemaError("cannot write " + opt.out_path);
    f << out.dump(2) << '\n';
    std::cout << "ablation table -> " << opt.out_path << '\n';
    return 0;
}

int cmd_pca(const PcaOptions& opt) {
    const Dataset ds = load_dataset(opt.data_path);
    const PcaResult pca = pca_project(ds, opt.dims);
    save_pca_csv(pca, ds, opt.out_path);
    std::cout << "explained variance:";
    for (double v : pca.explained_variance) std::cout << ' ' << v;
    std::cout << "  (of total " << pca.total_variance << ")\n";
    std::cout << pca.projected.rows << " rows -> " << opt.out_path << '\n';
    return 0;
}

int cmd_stream(const StreamOptions& opt) {
    const RecordingRun run = load_run(opt.run_dir);
    const ModelArtifact model = load_model(opt.model_path);
    PipelineConfig cfg;
    cfg.seg = opt.seg;
    cfg.realtime = opt.realtime;
    cfg.threaded = opt.threaded;
    cfg.window_s = opt.window_s;
    cfg.events_path = opt.out_path;
    cfg.actuation_log_path = opt.actuation_log;
    cfg.on_event = [](const StepEvent& ev) {
        json j{{"step_index", ev.step_index},
               {"t_start", ev.t_start},
               {"t_end", ev.t_end},
               {"label", std::string(terrain_name(ev.label))},
               {"action", std::string(action_name(ev.command.action))},
               {"extract_latency_ms", ev.extract_latency_ms},
               {"classify_latency_ms", ev.classify_latency_ms}};
        std::cout << j.dump() << '\n';
    };
    const auto events = run_pipeline(run, model, cfg);
    std::cerr << events.size() << " step events";
    if (!opt.out_path.empty()) std::cerr << " -> " << opt.out_path;
    std::cerr << '\n';
    return 0;
}

int cmd_bench(const BenchOptions& opt) {
    const RecordingRun run = load_run(opt.run_dir);
    const BenchResult result = bench_latency(opt.models, run, opt.steps, opt.seg);
    const double throughput = throughput_ratio(run, opt.seg);

    json j;
    j["machine"] = result.machine;
    j["steps"] = opt.steps;
    j["fast_path_throughput_ratio"] = throughput;
    json rows = json::array();
    std::cout << "machine: " << result.machine << '\n';
    for (const BenchRow& row : result.rows) {
        std::cout << row.algo << ": " << row.mean_ms << " ms/step over " << row.steps
                  << " steps\n";
        rows.push_back(json{{"model", row.model_path}, {"algo", row.algo},
                            {"mean_ms", row.mean_ms}});
    }
    std::cout << "fast-path throughput ratio: " << throughput << "x real time\n";
    j["rows"] = rows;
    std::ofstream f(opt.out_path, std::ios::binary);
    if (!f) throw SchemaError("cannot write " + opt.out_path);
    f << j.dump(2) << '\n';
    return 0;
}

int cmd_features_schema(const std::string& out_path) {
    json j;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(feature_schema_hash()));
    j["schema_hash"] = std::string(hash);
    j["feature_names"] = feature_names();
    j["groups"] = json{{"accelerometer", {kAccelBegin, kAcousticBegin}},
                       {"acoustic", {kAcousticBegin, kCapacitiveBegin}},
                       {"capacitive", {kCapacitiveBegin, kTactileBegin}},
                       {"tactile", {kTactileBegin, kTemperatureBegin}},
                       {"temperature", {kTemperatureBegin, kFeatureCount}}};
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw SchemaError("cannot write " + out_path);
        f << j.dump(2) << '\n';
        std::cout << "schema -> " << out_path << '\n';
    }
    return 0;
}

// --config file.json supplies defaults for any long option; explicit flags
// win because config-derived tokens are prepended before parsing.
std::vector<std::string> merge_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw SchemaError("cannot open config file: " + config_path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw SchemaError(config_path + ": " + e.what());
    }

    // drop the consumed --config tokens; subcommands do not declare it
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            ++i;
            continue;
        }
        if (args[i].rfind("--config=", 0) == 0) continue;
        rest.push_back(args[i]);
    }

    std::vector<std::string> merged;
    if (!rest.empty()) merged.push_back(rest[0]);  // subcommand stays first
    for (const auto& [key, value] : cfg.items()) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');  // keys may use either style
        const bool given = std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (given) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) merged.push_back(flag);
        } else {
            merged.push_back(flag);
            merged.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    merged.insert(merged.end(), rest.begin() + (rest.empty() ? 0 : 1), rest.end());
    return merged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"terrastep: terrain identification and adaptive foot control toolkit"};
    app.require_subcommand(1);
    std::string config_path;  // consumed by merge_config_args, declared so --help shows it
    app.add_option("--config", config_path, "JSON file with default option values")
        ->expected(0, 1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate the synthetic footstep corpus");
    gen_cmd->add_option("--steps", gen.steps, "Footsteps per terrain")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Corpus seed")->capture_default_str();
    gen_cmd->add_option("--terrains", gen.terrains_path, "Signature table JSON override");
    gen_cmd->add_option("--out", gen.out_dir, "Output directory")->capture_default_str();
    gen_cmd->add_option("--press-force-n", gen.cycle.press_force_n, "Loading force per step")
        ->capture_default_str();
    gen_cmd->add_option("--hold-s", gen.cycle.hold_s, "Hold duration")->capture_default_str();
    gen_cmd->add_option("--rest-s", gen.cycle.rest_s, "Rest between steps")->capture_default_str();
    gen_cmd->add_option("--descent-mm-s", gen.cycle.descent_speed_mm_s, "Descent speed")
        ->capture_default_str();

    ExtractOptions extract;
    auto* extract_cmd = app.add_subcommand("extract", "Segment runs and extract feature vectors");
    extract_cmd->add_option("--runs", extract.runs_dir, "Directory of run directories")
        ->capture_default_str();
    extract_cmd->add_option("--out", extract.out_path, "Output features.csv")->capture_default_str();
    extract_cmd->add_option("--bands", extract.bands_path, "Spectral band edges JSON");
    add_seg_options(extract_cmd, extract.seg);

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "Train a classifier");
    train_cmd->add_option("--data", train.data_path, "features.csv")->capture_default_str();
    train_cmd->add_option("--algo", train.algo, "knn/svm/rf/gb/ann")->capture_default_str();
    train_cmd->add_option("--seed", train.seed, "Training seed")->capture_default_str();
    train_cmd->add_option("--test-fraction", train.test_fraction,
                          "Stratified holdout fraction (0 trains on everything)")
        ->capture_default_str();
    train_cmd->add_option("--out", train.out_path, "Model file")->capture_default_str();
    train_cmd->add_option("--bands", train.bands_path, "Spectral band edges JSON");

    EvalOptions eval_opt;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model");
    eval_cmd->add_option("--model", eval_opt.model_path, "Model file")->capture_default_str();
    eval_cmd->add_option("--data", eval_opt.data_path, "features.csv")->capture_default_str();
    eval_cmd->add_option("--out", eval_opt.report_path, "Report JSON")->capture_default_str();
    eval_cmd->add_option("--confusion", eval_opt.confusion_path, "Confusion CSV")
        ->capture_default_str();
    eval_cmd->add_flag("--full", eval_opt.full, "Evaluate every row, not the held-out split");

    AblateOptions ablate_opt;
    auto* ablate_cmd = app.add_subcommand("ablate", "Sensor-subset retrain/evaluate");
    ablate_cmd->add_option("--data", ablate_opt.data_path, "features.csv")->capture_default_str();
    ablate_cmd->add_option("--algo", ablate_opt.algo, "knn/svm/rf/gb/ann")->capture_default_str();
    ablate_cmd->add_option("--seed", ablate_opt.seed, "Seed")->capture_default_str();
    ablate_cmd->add_option("--test-fraction", ablate_opt.test_fraction, "Holdout fraction")
        ->capture_default_str();
    ablate_cmd->add_option("--preset", ablate_opt.preset, "Named combination set: table4");
    ablate_cmd->add_option("--sensors", ablate_opt.sensors,
                           "Comma-separated sensors (temperature,accelerometer,microphone,"
                           "capacitive,tactile)")
        ->delimiter(',');
    ablate_cmd->add_option("--out", ablate_opt.out_path, "Results JSON")->capture_default_str();

    PcaOptions pca_opt;
    auto* pca_cmd = app.add_subcommand("pca", "Project the feature space for plotting");
    pca_cmd->add_option("--data", pca_opt.data_path, "features.csv")->capture_default_str();
    pca_cmd->add_option("--dims", pca_opt.dims, "Components")->capture_default_str();
    pca_cmd->add_option("--out", pca_opt.out_path, "pca.csv")->capture_default_str();

    StreamOptions stream;
    auto* stream_cmd = app.add_subcommand("stream", "Replay a run through the online pipeline");
    stream_cmd->add_option("--run", stream.run_dir, "Run directory")->required();
    stream_cmd->add_option("--model", stream.model_path, "Model file")->required();
    stream_cmd->add_option("--out", stream.out_path, "Step events JSONL");
    stream_cmd->add_option("--actuation-log", stream.actuation_log, "Actuation JSONL")
        ->capture_default_str();
    stream_cmd->add_flag("--realtime", stream.realtime, "Pace frames to the wall clock");
    stream_cmd->add_flag("--threaded", stream.threaded, "Producer/consumer FIFO split");
    stream_cmd->add_option("--window-s", stream.window_s, "Sliding buffer span")
        ->capture_default_str();
    add_seg_options(stream_cmd, stream.seg);

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Per-model inference latency over real steps");
    bench_cmd->add_option("--models", bench.models, "Model files")->delimiter(',')->required();
    bench_cmd->add_option("--run", bench.run_dir, "Run directory")->required();
    bench_cmd->add_option("--steps", bench.steps, "Steps to time")->capture_default_str();
    bench_cmd->add_option("--out", bench.out_path, "Results JSON")->capture_default_str();
    add_seg_options(bench_cmd, bench.seg);

    auto* features_cmd = app.add_subcommand("features", "Feature layout utilities");
    features_cmd->require_subcommand(1);
    std::string schema_out;
    auto* schema_cmd = features_cmd->add_subcommand("schema", "Print the frozen 100-feature table");
    schema_cmd->add_option("--out", schema_out, "Write JSON here instead of stdout");

    std::vector<std::string> args;
    try {
        args = merge_config_args(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        std::vector<char*> argv2;
        static const std::string prog = "terrastep";
        argv2.push_back(const_cast<char*>(prog.c_str()));
        for (auto& a : args) argv2.push_back(a.data());
        app.parse(static_cast<int>(argv2.size()), argv2.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (extract_cmd->parsed()) return cmd_extract(extract);
        if (train_cmd->parsed()) return cmd_train(train);
        if (eval_cmd->parsed()) return cmd_eval(eval_opt);
        if (ablate_cmd->parsed()) return cmd_ablate(ablate_opt);
        if (pca_cmd->parsed()) return cmd_pca(pca_opt);
        if (stream_cmd->parsed()) return cmd_stream(stream);
        if (bench_cmd->parsed()) return cmd_bench(bench);
        if (features_cmd->parsed()) return cmd_features_schema(schema_out);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
