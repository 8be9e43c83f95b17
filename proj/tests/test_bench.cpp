#include <doctest.h>

#include <fstream>
#include <sstream>
#include <iterator>

#include "lungbench/bench/cache.hpp"
#include "lungbench/bench/config.hpp"
#include "lungbench/bench/pipeline.hpp"
#include "lungbench/bench/reports.hpp"
#include "lungbench/bench/synthetic.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/dataset/audio.hpp"
#include "lungbench/dsp/features.hpp"

using namespace lungbench;
using namespace lungbench::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("lungbench_test_bench_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nn::ModelConfig small(const char* name) {
    auto m = *nn::parse_model_name(name);
    m.hidden_size = 4;
    m.recurrent_layers = 1;
    m.dense_units = 4;
    return m;
}

// 20 recordings in 10 groups, 2 test groups, 2 folds, no CAS.
BenchmarkConfig tiny_run(const fs::path& dir) {
    SyntheticDatasetOptions opts;
    opts.recordings = 20;
    opts.seed = 3;
    opts.fold_count = 2;
    opts.params.cas_rate = 0.0;
    opts.params.das_rate = 0.5;
    write_synthetic_dataset(dir / "data", opts);
    BenchmarkConfig cfg;
    cfg.manifest = dir / "data" / "manifest.tsv";
    cfg.output_dir = dir / "out";
    cfg.cache_dir = dir / "cache";
    cfg.tasks = {dataset::EventClass::I, dataset::EventClass::C};
    cfg.models = {small("GRU"), small("LSTM")};
    cfg.training.max_epochs = 1;
    cfg.training.batch_size = 4;
    cfg.training.initial_lr = 1e-2;
    cfg.seed = 5;
    cfg.save_models = false;
    return cfg;
}

}  // namespace

TEST_CASE("config defaults and JSON round trip") {
    BenchmarkConfig d;
    CHECK(d.models.size() == 12);
    CHECK(d.tasks == std::vector<dataset::EventClass>{dataset::EventClass::I});
    CHECK(d.postproc.threshold == 0.5);
    CHECK(d.resolved_cache_dir() == d.output_dir / "cache");

    const auto dir = scratch("config");
    nlohmann::json j = {{"manifest", "data/m.tsv"},
                        {"tasks", {"I", "D"}},
                        {"models", {"BiGRU", {{"model", "CNN-LSTM"}, {"hidden_size", 32}}}},
                        {"training", {{"max_epochs", 3}}},
                        {"postproc", {{"merge", false}}},
                        {"seed", 9}};
    std::ofstream(dir / "c.json") << j.dump();
    const auto c = load_config(dir / "c.json");
    CHECK(c.manifest == dir / "data/m.tsv");
    CHECK(c.output_dir == dir / "lungbench_out");
    REQUIRE(c.models.size() == 2);
    CHECK(c.models[1].variant == nn::Variant::CNN_LSTM);
    CHECK(c.models[1].hidden_size == 32);
    CHECK(c.training.max_epochs == 3);
    CHECK(c.training.batch_size == 32);
    CHECK_FALSE(c.postproc.merge);
    CHECK(c.seed == 9);

    const nlohmann::json back = c;
    const auto again = back.get<BenchmarkConfig>();
    CHECK(again.models[1].hidden_size == 32);
    CHECK(again.tasks == c.tasks);

    CHECK_THROWS_AS(parse_task("W"), Error);
    std::ofstream(dir / "bad.json") << R"({"tasks": ["X"]})";
    CHECK_THROWS_AS(load_config(dir / "bad.json"), Error);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), Error);
}

TEST_CASE("feature cache is bit-exact and recovers from corruption") {
    const auto dir = scratch("cache");
    dataset::SynthesisParams params;
    const auto rec = dataset::synthesize_recording(params, 12);
    dataset::write_wav(dir / "a.wav", rec.clip);

    FeatureCache cache(dir / "cache");
    const auto first = cache.get(dir / "a.wav");
    CHECK(cache.misses() == 1);
    const auto second = cache.get(dir / "a.wav");
    CHECK(cache.hits() == 1);
    CHECK(*first.features == *second.features);
    CHECK(first.spectrogram->magnitudes == second.spectrogram->magnitudes);
    CHECK(second.spectrogram->frame_times.size() == 938);

    // Recomputing from the decoded clip reproduces the cached values.
    const auto fresh = dsp::extract_features(dataset::truncate_clip(dataset::read_wav(dir / "a.wav")));
    CHECK(fresh.features.values == *second.features);
    CHECK(fresh.spectrogram.magnitudes == second.spectrogram->magnitudes);

    const auto entry = cache.entry_path(first.clip_checksum);
    {
        std::fstream f(entry, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(100);
        f.put('\x7f');
    }
    CHECK_THROWS_AS(read_cache_entry(entry), Error);
    const auto third = cache.get(dir / "a.wav");
    CHECK(*third.features == *first.features);
    CHECK(cache.warnings().size() == 1);
    CHECK_NOTHROW(read_cache_entry(entry));

    fs::resize_file(entry, 50);
    CHECK_THROWS_AS(read_cache_entry(entry), Error);
}

TEST_CASE("task filtering, plans and leakage") {
    const auto dir = scratch("plan");
    const auto cfg = tiny_run(dir);
    const auto data = load_dataset(cfg);
    CHECK(data.manifest.records.size() == 20);
    CHECK(task_records(data.manifest, dataset::EventClass::I).size() == 20);
    CHECK(task_records(data.manifest, dataset::EventClass::C).empty());
    for (std::size_t i : task_records(data.manifest, dataset::EventClass::D))
        CHECK_FALSE(task_events(data.manifest.records[i].labels, dataset::EventClass::D).empty());

    const auto plan_c = plan_task(data, dataset::EventClass::C, cfg.seed);
    CHECK_FALSE(plan_c.skip_reason.empty());

    const auto plan = plan_task(data, dataset::EventClass::I, cfg.seed);
    CHECK(plan.skip_reason.empty());
    CHECK(plan.test.size() == 4);
    REQUIRE(plan.folds.size() == 2);
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        CHECK_NOTHROW(assert_no_leakage(data, plan, f));
        CHECK(plan.folds[f].train.size() + plan.folds[f].validation.size() == 16);
    }
    auto leaky = plan;
    leaky.folds[0].train.push_back(plan.test[0]);
    CHECK_THROWS_AS(assert_no_leakage(data, leaky, 0), Error);
}

TEST_CASE("parameter rows carry the reference counts") {
    const auto row = parameter_row(*nn::parse_model_name("LSTM"));
    CHECK(row.measured == 300609);
    REQUIRE(row.reference.has_value());
    CHECK(*row.reference == 300609);
    CHECK(row.matches());
    std::size_t sum = 0;
    for (const auto& [name, n] : row.breakdown) sum += n;
    CHECK(sum == row.measured);
    CHECK(row.breakdown.front().first == "rnn0");
    CHECK(row.breakdown.back().first == "output");

    const auto custom = parameter_row(small("GRU"));
    CHECK_FALSE(custom.reference.has_value());
    CHECK(format_breakdown(custom).find("rnn0") != std::string::npos);
}

TEST_CASE("vertical ROC averaging takes the upper envelope") {
    eval::RocCurve curve;
    curve.points = {{1e9, 0.0, 0.0}, {0.8, 0.0, 0.5}, {0.4, 0.5, 1.0}, {0.1, 1.0, 1.0}};
    CHECK(upper_tpr(curve, 0.0) == 0.5);
    CHECK(upper_tpr(curve, 0.25) == 0.75);
    CHECK(upper_tpr(curve, 0.5) == 1.0);
    CHECK(upper_tpr(curve, 1.0) == 1.0);
}

TEST_CASE("empty model list yields only params.csv and the summary") {
    const auto dir = scratch("empty");
    ReportBundle bundle;
    bundle.tasks = {dataset::EventClass::I};
    const auto files = emit_reports(bundle, dir);
    REQUIRE(files.size() == 2);
    CHECK(slurp(dir / "params.csv") == "model,measured,reference,status\n");
    CHECK(fs::exists(dir / "summary.txt"));
}

TEST_CASE("tiny benchmark: reports, skips, failures and determinism") {
    const auto dir = scratch("run");
    auto cfg = tiny_run(dir);
    const auto bundle = run_benchmark(cfg);
    emit_reports(bundle, cfg.output_dir);
    REQUIRE(bundle.cells.size() == 4);
    for (const auto& c : bundle.cells) {
        if (c.task == dataset::EventClass::C) {
            CHECK(c.status == CellStatus::skipped);
        } else {
            CHECK(c.status == CellStatus::ok);
            CHECK(c.folds.size() == 2);
        }
    }
    for (const char* f : {"params.csv", "f1_comparison.csv", "appendix_metrics_I.csv", "appendix_metrics_C.csv",
                          "fold_metrics_I.csv", "roc_gru_I.csv", "mape_gru_I.csv", "roc_lstm_I.csv", "mape_lstm_I.csv",
                          "roc_gru_I_folds.csv", "mape_lstm_I_folds.csv",
                          "summary.txt"})
        CHECK_MESSAGE(fs::exists(cfg.output_dir / f), f);
    CHECK_FALSE(fs::exists(cfg.output_dir / "roc_gru_C.csv"));
    CHECK(slurp(cfg.output_dir / "roc_gru_I.csv").starts_with("fpr,tpr\n0,"));
    CHECK(slurp(cfg.output_dir / "mape_gru_I.csv").starts_with("threshold,mape\n0.05,"));

    const auto f1 = slurp(cfg.output_dir / "f1_comparison.csv");
    CHECK(f1.starts_with("model,parameters,I_segment_f1,I_event_f1,C_segment_f1,C_event_f1\n"));
    CHECK(f1.find("skipped,skipped") != std::string::npos);

    // Event-level accuracy and specificity are undefined.
    std::istringstream appendix(slurp(cfg.output_dir / "appendix_metrics_I.csv"));
    std::string header, row;
    std::getline(appendix, header);
    std::getline(appendix, row);
    CHECK(header ==
          "model,status,segment_accuracy,segment_ppv,segment_sensitivity,segment_specificity,segment_f1,"
          "event_accuracy,event_ppv,event_sensitivity,event_specificity,event_f1,auc");
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 13);
    CHECK(cells[7] == "NA");
    CHECK(cells[10] == "NA");
    CHECK(cells[2] != "NA");

    // Same seed and inputs, fresh cache and output: identical CSVs.
    auto rerun = cfg;
    rerun.output_dir = dir / "out2";
    rerun.cache_dir = dir / "cache2";
    emit_reports(run_benchmark(rerun), rerun.output_dir);
    for (const auto& e : fs::directory_iterator(cfg.output_dir)) {
        if (e.path().extension() != ".csv") continue;
        CHECK_MESSAGE(slurp(e.path()) == slurp(rerun.output_dir / e.path().filename()), e.path().filename());
    }

    // A missing clip fails the cells that need it; the run still completes.
    const auto manifest = dataset::read_manifest(cfg.manifest, false);
    fs::remove(manifest.records[0].clip_ref);
    auto broken = cfg;
    broken.output_dir = dir / "out3";
    broken.tasks = {dataset::EventClass::I};
    const auto partial = run_benchmark(broken);
    REQUIRE(partial.cells.size() == 2);
    for (const auto& c : partial.cells) {
        CHECK(c.status == CellStatus::failed);
        CHECK_FALSE(c.error_code.empty());
    }
    CHECK_FALSE(partial.metadata.warnings.empty());
    emit_reports(partial, broken.output_dir);
    CHECK(slurp(broken.output_dir / "appendix_metrics_I.csv").find("failed") != std::string::npos);
}

TEST_CASE("duplicate models are rejected") {
    BenchmarkConfig cfg;
    cfg.models = {small("GRU"), small("GRU")};
    CHECK_THROWS_AS(run_benchmark(cfg), Error);
}
