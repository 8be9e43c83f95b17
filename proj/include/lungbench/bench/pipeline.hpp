#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lungbench/bench/cache.hpp"
#include "lungbench/bench/config.hpp"
#include "lungbench/dataset/manifest.hpp"
#include "lungbench/dataset/split.hpp"
#include "lungbench/eval/report.hpp"
#include "lungbench/nn/trainer.hpp"

namespace lungbench::bench {

using Logger = std::function<void(const std::string&)>;

// Manifest plus cached features. A record whose audio could not be
// featurized keeps its error; cells touching it fail with that error.
struct LoadedDataset {
    dataset::DatasetManifest manifest;
    std::vector<std::optional<CachedFeatures>> features;
    std::vector<std::string> feature_errors;  // code: message, empty when fine
    std::vector<std::string> warnings;
    int cache_hits = 0;
    int cache_misses = 0;
    double featurize_seconds = 0.0;
};

LoadedDataset load_dataset(const BenchmarkConfig& config, const Logger& log = {});

// Ground-truth events of a benchmark task (C is derived from W/S/R).
std::vector<dataset::LabelEvent> task_events(std::span<const dataset::LabelEvent> labels, dataset::EventClass task);

// Records eligible for a task: every record for I and E, only records that
// contain at least one event of the class for C and D.
std::vector<std::size_t> task_records(const dataset::DatasetManifest& manifest, dataset::EventClass task);

// Indices refer to LoadedDataset records.
struct TaskPlan {
    dataset::EventClass task = dataset::EventClass::I;
    std::vector<std::size_t> test;
    std::vector<dataset::FoldAssignment> folds;
    std::string skip_reason;  // non-empty: nothing to train or test on
};

// Grouped folds over the eligible non-test records, seeded by `seed`.
TaskPlan plan_task(const LoadedDataset& data, dataset::EventClass task, std::uint64_t seed);

// Throws "bench.leakage" if any training or validation record shares a
// group key with a test record.
void assert_no_leakage(const LoadedDataset& data, const TaskPlan& plan, std::size_t fold);

// Model and mini-batch seeds for one (model, task, fold) cell.
nn::ModelConfig fold_model(const nn::ModelConfig& model, dataset::EventClass task, std::size_t fold, std::uint64_t seed);
nn::TrainingConfig fold_training(const nn::TrainingConfig& training, const nn::ModelConfig& model,
                                 dataset::EventClass task, std::size_t fold, std::uint64_t seed);

std::vector<nn::Example> make_examples(const LoadedDataset& data, std::span<const std::size_t> records,
                                       const nn::ModelConfig& model, dataset::EventClass task);

struct TrainedFold {
    nn::ModelConfig model;
    nn::TrainingConfig training;
    nn::TrainResult result;
    int train_recordings = 0;
    int validation_recordings = 0;
    double seconds = 0.0;
};

TrainedFold train_fold(const LoadedDataset& data, const TaskPlan& plan, const nn::ModelConfig& model,
                       std::size_t fold, const BenchmarkConfig& config, const Logger& log = {});

// Per-recording frame probabilities at the model's output resolution.
std::vector<std::vector<float>> predict_records(const LoadedDataset& data, std::span<const std::size_t> records,
                                                const nn::ModelConfig& model, const nn::ParameterSet& params,
                                                int workers);

eval::TaskReport evaluate_records(const LoadedDataset& data, std::span<const std::size_t> records,
                                  const std::vector<std::vector<float>>& probs, const nn::ModelConfig& model,
                                  dataset::EventClass task, const postproc::PostprocConfig& postproc, int workers);

enum class CellStatus { ok, failed, skipped };
const char* to_string(CellStatus status);

struct FoldResult {
    int fold = 0;
    int train_recordings = 0;
    int validation_recordings = 0;
    int epochs = 0;
    int best_epoch = 0;
    double best_validation_loss = 0.0;
    double train_seconds = 0.0;
    eval::TaskReport test;
};

// Headline numbers of a cell: the unweighted mean over folds of each
// fold's test metrics.
struct FoldMean {
    eval::MetricSet segment;
    eval::MetricSet event;
    double auc = 0.0;
    bool auc_defined = false;
    std::vector<double> mape_thresholds;
    std::vector<double> mape;
    bool mape_defined = false;
};

struct CellResult {
    nn::ModelConfig model;
    dataset::EventClass task = dataset::EventClass::I;
    CellStatus status = CellStatus::ok;
    std::string error_code;
    std::string message;
    int test_recordings = 0;
    std::vector<FoldResult> folds;
    FoldMean mean;
};

FoldMean fold_mean(std::span<const FoldResult> folds);

struct ParamRow {
    nn::ModelConfig model;
    std::size_t measured = 0;
    std::optional<std::size_t> reference;
    std::vector<std::pair<std::string, std::size_t>> breakdown;  // per layer prefix
    bool matches() const { return reference && *reference == measured; }
};

ParamRow parameter_row(const nn::ModelConfig& model);

struct RunMetadata {
    std::uint64_t seed = 0;
    std::string version;
    int recordings = 0;
    int test_recordings = 0;
    int cache_hits = 0;
    int cache_misses = 0;
    double featurize_seconds = 0.0;
    double total_seconds = 0.0;
    std::vector<std::string> warnings;
};

struct ReportBundle {
    std::vector<dataset::EventClass> tasks;
    std::vector<CellResult> cells;  // model-major, in config order
    std::vector<ParamRow> params;
    RunMetadata metadata;
};

CellResult run_cell(const LoadedDataset& data, const nn::ModelConfig& model, dataset::EventClass task,
                    const BenchmarkConfig& config, const Logger& log = {});

// ingest (manifest) -> featurize (cached) -> per model x task: grouped
// k-fold training -> test prediction -> postprocessing -> evaluation.
// Cell-level failures are recorded and the run continues. Writes fold
// checkpoints when config.save_models, but no reports.
ReportBundle run_benchmark(const BenchmarkConfig& config, const Logger& log = {});

inline constexpr const char* kToolkitVersion = "1.0.0";

}  // namespace lungbench::bench
