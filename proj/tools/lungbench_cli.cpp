// lungbench command-line front end. Every subcommand accepts --config <file>
// (JSON, see bench/config.hpp); errors are printed to stderr as
// {"error": <code>, "message": <text>} with a nonzero exit status.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lungbench/bench/config.hpp"
#include "lungbench/bench/pipeline.hpp"
#include "lungbench/bench/reports.hpp"
#include "lungbench/bench/synthetic.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/common/format.hpp"
#include "lungbench/dataset/audio.hpp"
#include "lungbench/dataset/manifest.hpp"
#include "lungbench/dsp/features.hpp"
#include "lungbench/nn/checkpoint.hpp"
#include "lungbench/nn/serialize.hpp"
#include "lungbench/postproc/events.hpp"

namespace fs = std::filesystem;
using namespace lungbench;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::string manifest;
    std::string output;
    int workers = 0;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON config file");
    cmd->add_option("--manifest", c.manifest, "override the manifest path");
    cmd->add_option("--output", c.output, "override the output directory");
    cmd->add_option("--workers", c.workers, "override the worker count");
    cmd->add_flag("--quiet", c.quiet, "suppress progress output");
}

bench::BenchmarkConfig resolve_config(const Common& c) {
    bench::BenchmarkConfig cfg = c.config.empty() ? bench::BenchmarkConfig{} : bench::load_config(c.config);
    if (!c.manifest.empty()) cfg.manifest = c.manifest;
    if (!c.output.empty()) cfg.output_dir = c.output;
    if (c.workers > 0) cfg.workers = c.workers;
    cfg.validate();
    return cfg;
}

bench::Logger logger(const Common& c) {
    if (c.quiet) return {};
    return [](const std::string& line) { std::cerr << line << '\n'; };
}

nn::ModelConfig resolve_model(const bench::BenchmarkConfig& cfg, const std::string& name) {
    const auto parsed = nn::parse_model_name(name);
    if (!parsed) throw Error("config.model", "unknown model: " + name);
    // A configured entry of the same variant carries its width overrides.
    for (const auto& m : cfg.models) {
        if (m.slug() == parsed->slug()) return m;
    }
    return *parsed;
}

fs::path checkpoint_path(const bench::BenchmarkConfig& cfg, const nn::ModelConfig& m, dataset::EventClass task,
                         int fold) {
    return cfg.output_dir / "models" /
           (m.slug() + "_" + dataset::to_string(task) + "_fold" + std::to_string(fold) + ".ckpt");
}

json metrics_json(const eval::MetricSet& m) {
    json j;
    j["accuracy"] = m.accuracy ? json(*m.accuracy) : json(nullptr);
    j["ppv"] = m.ppv;
    j["sensitivity"] = m.sensitivity;
    j["specificity"] = m.specificity ? json(*m.specificity) : json(nullptr);
    j["f1"] = m.f1;
    return j;
}

json report_json(const eval::TaskReport& r) {
    json j;
    j["recordings"] = r.recordings;
    j["segment"] = metrics_json(r.segment);
    j["event"] = metrics_json(r.event);
    j["event_counts"] = {{"tp", r.event_counts.tp}, {"fp", r.event_counts.fp}, {"fn", r.event_counts.fn}};
    j["auc"] = r.roc.defined ? json(r.roc.auc) : json(nullptr);
    return j;
}

// Loads the fold checkpoint written by `train` or `benchmark`.
nn::Checkpoint load_fold(const bench::BenchmarkConfig& cfg, const nn::ModelConfig& m, dataset::EventClass task,
                         int fold) {
    return nn::load_checkpoint(checkpoint_path(cfg, m, task, fold));
}

int run(int argc, char** argv) {
    CLI::App app{"lungbench: lung sound event detection benchmark"};
    app.require_subcommand(1);
    Common common;

    auto* ingest = app.add_subcommand("ingest", "build a manifest from a directory tree");
    std::string ingest_root, ingest_out = "manifest.tsv";
    double ingest_test_fraction = 0.2;
    std::uint64_t ingest_seed = 0;
    ingest->add_option("--root", ingest_root, "dataset root")->required();
    ingest->add_option("--out", ingest_out, "manifest to write");
    ingest->add_option("--test-fraction", ingest_test_fraction, "fraction of groups held out when no train/test dirs");
    ingest->add_option("--seed", ingest_seed, "split seed");
    add_common(ingest, common);

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    bench::SyntheticDatasetOptions synth_opts;
    std::string synth_out = "synthetic";
    synth->add_option("--n", synth_opts.recordings, "number of recordings");
    synth->add_option("--seed", synth_opts.seed, "generator seed");
    synth->add_option("--cas-rate", synth_opts.params.cas_rate, "probability of CAS per recording");
    synth->add_option("--das-rate", synth_opts.params.das_rate, "probability of DAS per recording");
    synth->add_option("--group-size", synth_opts.group_size, "recordings per patient-day group");
    synth->add_option("--test-fraction", synth_opts.test_fraction, "fraction of groups in the test split");
    synth->add_option("--out", synth_out, "output directory");
    add_common(synth, common);

    auto* featurize = app.add_subcommand("featurize", "fill the feature cache");
    std::string dump_clip, dump_csv;
    featurize->add_option("--clip", dump_clip, "featurize one WAV file instead of the manifest");
    featurize->add_option("--csv", dump_csv, "with --clip: write the feature matrix as CSV (row = frame)");
    add_common(featurize, common);

    std::string model_name;
    std::string task_name = "I";
    int fold = 0;
    auto add_cell = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_name, "model variant, e.g. BiGRU")->required();
        cmd->add_option("--task", task_name, "I, E, C or D");
        cmd->add_option("--fold", fold, "cross-validation fold");
        add_common(cmd, common);
    };
    auto* train = app.add_subcommand("train", "train one fold of one model");
    add_cell(train);
    auto* predict = app.add_subcommand("predict", "write predicted events for the test split");
    add_cell(predict);
    auto* evaluate = app.add_subcommand("evaluate", "evaluate one trained fold on the test split");
    add_cell(evaluate);

    auto* benchmark = app.add_subcommand("benchmark", "full cross-validated sweep with reports");
    add_common(benchmark, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", "cli.usage"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    }

    if (*ingest) {
        auto manifest = dataset::ingest_directory(ingest_root, ingest_test_fraction, ingest_seed);
        dataset::write_manifest(ingest_out, manifest);
        std::cout << json{{"manifest", ingest_out}, {"records", manifest.records.size()}}.dump() << '\n';
        return 0;
    }
    if (*synth) {
        const auto manifest = bench::write_synthetic_dataset(synth_out, synth_opts);
        std::size_t test = 0;
        for (const auto& r : manifest.records) test += r.split == dataset::Split::test ? 1 : 0;
        std::cout << json{{"manifest", (fs::path(synth_out) / "manifest.tsv").string()},
                          {"records", manifest.records.size()},
                          {"test", test}}
                         .dump()
                  << '\n';
        return 0;
    }

    if (*featurize && !dump_clip.empty()) {
        if (dump_csv.empty()) throw Error("cli.usage", "--clip requires --csv");
        const auto features = dsp::build_feature_matrix(dataset::truncate_clip(dataset::read_wav(dump_clip)));
        std::ofstream out(dump_csv);
        if (!out) throw Error("cli.write", "cannot write " + dump_csv);
        const auto& m = features.values;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_roundtrip(m(r, c));
            out << '\n';
        }
        if (!out) throw Error("cli.write", "write failed: " + dump_csv);
        std::cout << json{{"csv", dump_csv}, {"rows", m.rows()}, {"cols", m.cols()}}.dump() << '\n';
        return 0;
    }

    const auto cfg = resolve_config(common);
    const auto log = logger(common);

    if (*featurize) {
        const auto data = bench::load_dataset(cfg, log);
        for (const auto& w : data.warnings) std::cerr << w << '\n';
        std::cout << json{{"records", data.manifest.records.size()},
                          {"cached", data.cache_hits},
                          {"computed", data.cache_misses},
                          {"cache_dir", cfg.resolved_cache_dir().string()}}
                         .dump()
                  << '\n';
        return 0;
    }
    if (*benchmark) {
        const auto bundle = bench::run_benchmark(cfg, log);
        const auto files = bench::emit_reports(bundle, cfg.output_dir);
        json j;
        j["output_dir"] = cfg.output_dir.string();
        j["files"] = json::array();
        for (const auto& f : files) j["files"].push_back(f.filename().string());
        int failed = 0;
        for (const auto& c : bundle.cells) failed += c.status == bench::CellStatus::failed ? 1 : 0;
        j["failed_cells"] = failed;
        std::cout << j.dump() << '\n';
        return 0;
    }

    const auto task = bench::parse_task(task_name);
    const auto model = resolve_model(cfg, model_name);
    const auto data = bench::load_dataset(cfg, log);
    const auto plan = bench::plan_task(data, task, cfg.seed);
    if (!plan.skip_reason.empty()) throw Error("bench.skipped", plan.skip_reason);

    if (*train) {
        const auto trained = bench::train_fold(data, plan, model, static_cast<std::size_t>(fold), cfg, log);
        const auto path = checkpoint_path(cfg, model, task, fold);
        fs::create_directories(path.parent_path());
        nn::save_checkpoint(path, {trained.model, trained.training, trained.result.params, trained.result.optimizer,
                                   trained.result.history});
        std::cout << json{{"checkpoint", path.string()},
                          {"epochs", trained.result.history.epochs.size()},
                          {"best_epoch", trained.result.history.best_epoch},
                          {"seconds", trained.seconds}}
                         .dump()
                  << '\n';
        return 0;
    }

    const auto ckpt = load_fold(cfg, model, task, fold);
    const auto probs = bench::predict_records(data, plan.test, ckpt.model, ckpt.params, cfg.workers);

    if (*predict) {
        const auto dir = cfg.output_dir / "predictions" /
                         (model.slug() + "_" + dataset::to_string(task) + "_fold" + std::to_string(fold));
        fs::create_directories(dir);
        std::size_t events = 0;
        for (std::size_t k = 0; k < plan.test.size(); ++k) {
            const auto& rec = data.manifest.records[plan.test[k]];
            const auto& spec = data.features[plan.test[k]]->spectrogram;
            const auto ev = postproc::postprocess(probs[k], spec.get(), cfg.postproc);
            events += ev.size();
            postproc::write_events_csv(dir / (fs::path(rec.clip_ref).stem().string() + "_events.csv"), task, ev);
        }
        std::cout << json{{"predictions", dir.string()}, {"recordings", plan.test.size()}, {"events", events}}.dump()
                  << '\n';
        return 0;
    }

    // evaluate
    const auto report = bench::evaluate_records(data, plan.test, probs, ckpt.model, task, cfg.postproc, cfg.workers);
    json j = report_json(report);
    j["model"] = model.name();
    j["task"] = dataset::to_string(task);
    j["fold"] = fold;
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
}
