#include "lungbench/bench/pipeline.hpp"

#include <chrono>
#include <set>

#include "lungbench/common/checksum.hpp"
#include "lungbench/common/constants.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/common/format.hpp"
#include "lungbench/common/parallel.hpp"
#include "lungbench/common/random.hpp"
#include "lungbench/dataset/targets.hpp"
#include "lungbench/nn/checkpoint.hpp"
#include "lungbench/nn/network.hpp"

namespace lungbench::bench {

using dataset::EventClass;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void emit(const Logger& log, const std::string& line) {
    if (log) log(line);
}

std::uint64_t cell_salt(const nn::ModelConfig& model, EventClass task, std::size_t fold) {
    const std::string key = model.slug() + "|" + dataset::to_string(task) + "|" + std::to_string(fold);
    return fnv1a64(std::as_bytes(std::span<const char>(key.data(), key.size())));
}

const CachedFeatures& features_of(const LoadedDataset& data, std::size_t record) {
    const auto& f = data.features.at(record);
    if (!f) {
        const auto& err = data.feature_errors[record];
        const auto colon = err.find(':');
        throw Error(colon == std::string::npos ? "data.missing" : err.substr(0, colon),
                    data.manifest.records[record].clip_ref + ": " + err);
    }
    return *f;
}

}  // namespace

const char* to_string(CellStatus status) {
    switch (status) {
        case CellStatus::ok: return "ok";
        case CellStatus::failed: return "failed";
        case CellStatus::skipped: return "skipped";
    }
    return "?";
}

LoadedDataset load_dataset(const BenchmarkConfig& config, const Logger& log) {
    const auto t0 = Clock::now();
    LoadedDataset data;
    data.manifest = dataset::read_manifest(config.manifest);
    if (data.manifest.records.empty()) throw Error("bench.manifest", "manifest has no records: " + config.manifest.string());
    dataset::check_group_consistency(data.manifest);

    const auto n = data.manifest.records.size();
    data.features.resize(n);
    data.feature_errors.resize(n);
    FeatureCache cache(config.resolved_cache_dir());
    parallel_for(n, config.workers, [&](std::size_t i) {
        try {
            data.features[i] = cache.get(data.manifest.records[i].clip_ref);
        } catch (const Error& e) {
            data.feature_errors[i] = e.code() + ": " + e.what();
        } catch (const std::exception& e) {
            data.feature_errors[i] = std::string("data.read: ") + e.what();
        }
    });
    data.warnings = cache.warnings();
    data.cache_hits = cache.hits();
    data.cache_misses = cache.misses();
    for (std::size_t i = 0; i < n; ++i) {
        if (!data.feature_errors[i].empty())
            data.warnings.push_back("featurization failed for " + data.manifest.records[i].clip_ref + ": " +
                                    data.feature_errors[i]);
    }
    data.featurize_seconds = seconds_since(t0);
    emit(log, "featurized " + std::to_string(n) + " recordings (" + std::to_string(cache.hits()) + " cached) in " +
                  format_fixed(data.featurize_seconds, 1) + " s");
    return data;
}

std::vector<dataset::LabelEvent> task_events(std::span<const dataset::LabelEvent> labels, EventClass task) {
    if (task == EventClass::C) return dataset::events_of(dataset::derive_cas_labels(labels), EventClass::C);
    return dataset::events_of(labels, task);
}

std::vector<std::size_t> task_records(const dataset::DatasetManifest& manifest, EventClass task) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        if (task == EventClass::I || task == EventClass::E || !task_events(manifest.records[i].labels, task).empty())
            out.push_back(i);
    }
    return out;
}

TaskPlan plan_task(const LoadedDataset& data, EventClass task, std::uint64_t seed) {
    TaskPlan plan;
    plan.task = task;
    dataset::DatasetManifest sub;
    sub.fold_count = data.manifest.fold_count;
    sub.seed = seed;
    std::vector<std::size_t> origin;
    for (std::size_t i : task_records(data.manifest, task)) {
        if (data.manifest.records[i].split == dataset::Split::test) {
            plan.test.push_back(i);
        } else {
            sub.records.push_back(data.manifest.records[i]);
            origin.push_back(i);
        }
    }
    const std::string name = dataset::to_string(task);
    if (plan.test.empty()) {
        plan.skip_reason = "no test recordings eligible for task " + name;
        return plan;
    }
    if (sub.records.empty()) {
        plan.skip_reason = "no training recordings eligible for task " + name;
        return plan;
    }
    for (auto fold : dataset::grouped_kfold(sub)) {
        for (auto& i : fold.train) i = origin[i];
        for (auto& i : fold.validation) i = origin[i];
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

void assert_no_leakage(const LoadedDataset& data, const TaskPlan& plan, std::size_t fold) {
    std::set<std::string> test_groups;
    for (std::size_t i : plan.test) test_groups.insert(data.manifest.records[i].group_key);
    const auto& f = plan.folds.at(fold);
    for (const auto* part : {&f.train, &f.validation}) {
        for (std::size_t i : *part) {
            const auto& rec = data.manifest.records[i];
            if (test_groups.contains(rec.group_key) || rec.split == dataset::Split::test)
                throw Error("bench.leakage", "group " + rec.group_key + " appears in both training and test data");
        }
    }
}

nn::ModelConfig fold_model(const nn::ModelConfig& model, EventClass task, std::size_t fold, std::uint64_t seed) {
    nn::ModelConfig m = model;
    m.seed = mix_seed(mix_seed(seed, model.seed), cell_salt(model, task, fold));
    return m;
}

nn::TrainingConfig fold_training(const nn::TrainingConfig& training, const nn::ModelConfig& model, EventClass task,
                                 std::size_t fold, std::uint64_t seed) {
    nn::TrainingConfig t = training;
    t.seed = mix_seed(mix_seed(seed, training.seed) ^ 0xBA7C4ULL, cell_salt(model, task, fold));
    return t;
}

std::vector<nn::Example> make_examples(const LoadedDataset& data, std::span<const std::size_t> records,
                                       const nn::ModelConfig& model, EventClass task) {
    std::vector<nn::Example> out;
    out.reserve(records.size());
    const int steps = model.output_steps(kFrames);
    for (std::size_t i : records) {
        nn::Example ex;
        ex.features = features_of(data, i).features;
        const auto events = task_events(data.manifest.records[i].labels, task);
        ex.targets = dataset::make_segment_targets(events, task, steps).values;
        out.push_back(std::move(ex));
    }
    return out;
}

TrainedFold train_fold(const LoadedDataset& data, const TaskPlan& plan, const nn::ModelConfig& model,
                       std::size_t fold, const BenchmarkConfig& config, const Logger& log) {
    if (fold >= plan.folds.size()) throw Error("bench.fold", "fold index out of range: " + std::to_string(fold));
    assert_no_leakage(data, plan, fold);
    const auto t0 = Clock::now();
    TrainedFold out;
    out.model = fold_model(model, plan.task, fold, config.seed);
    out.training = fold_training(config.training, model, plan.task, fold, config.seed);
    const auto& assignment = plan.folds[fold];
    const auto train = make_examples(data, assignment.train, out.model, plan.task);
    const auto validation = make_examples(data, assignment.validation, out.model, plan.task);
    out.train_recordings = static_cast<int>(train.size());
    out.validation_recordings = static_cast<int>(validation.size());

    nn::TrainingHooks hooks;
    const std::string tag = model.name() + " " + dataset::to_string(plan.task) + " fold " + std::to_string(fold);
    hooks.on_epoch = [&](const nn::EpochRecord& r) {
        emit(log, tag + " epoch " + std::to_string(r.epoch) + " train " + format_fixed(r.train_loss, 5) + " val " +
                      format_fixed(r.validation_loss, 5) + " lr " + format_roundtrip(r.learning_rate));
    };
    out.result = nn::train_model(out.model, out.training, train, validation, hooks);
    out.seconds = seconds_since(t0);
    return out;
}

std::vector<std::vector<float>> predict_records(const LoadedDataset& data, std::span<const std::size_t> records,
                                                const nn::ModelConfig& model, const nn::ParameterSet& params,
                                                int workers) {
    for (std::size_t i : records) features_of(data, i);
    std::vector<std::vector<float>> out(records.size());
    parallel_for(records.size(), workers, [&](std::size_t k) {
        out[k] = nn::forward(model, params, *features_of(data, records[k]).features);
    });
    return out;
}

eval::TaskReport evaluate_records(const LoadedDataset& data, std::span<const std::size_t> records,
                                  const std::vector<std::vector<float>>& probs, const nn::ModelConfig& model,
                                  EventClass task, const postproc::PostprocConfig& postproc, int workers) {
    if (probs.size() != records.size()) throw Error("eval.shape", "one probability track per recording expected");
    const int steps = model.output_steps(kFrames);
    std::vector<eval::RecordingEval> recs(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& record = data.manifest.records[records[k]];
        auto& r = recs[k];
        r.probs = probs[k];
        const auto events = task_events(record.labels, task);
        r.targets = dataset::make_segment_targets(events, task, steps).values;
        for (const auto& e : events) r.gt_events.push_back({e.start, e.end});
        r.spectrogram = features_of(data, records[k]).spectrogram.get();
    }
    return eval::evaluate_task(recs, postproc, workers);
}

FoldMean fold_mean(std::span<const FoldResult> folds) {
    FoldMean m;
    if (folds.empty()) return m;
    std::vector<eval::MetricSet> seg, ev;
    m.auc_defined = true;
    m.mape_defined = true;
    for (const auto& f : folds) {
        seg.push_back(f.test.segment);
        ev.push_back(f.test.event);
        m.auc_defined = m.auc_defined && f.test.roc.defined;
        m.mape_defined = m.mape_defined && f.test.mape.defined;
    }
    m.segment = eval::macro_average(seg);
    m.event = eval::macro_average(ev);
    const auto n = static_cast<double>(folds.size());
    if (m.auc_defined) {
        for (const auto& f : folds) m.auc += f.test.roc.auc / n;
    }
    m.mape_thresholds = folds.front().test.mape.thresholds;
    if (m.mape_defined) {
        m.mape.assign(m.mape_thresholds.size(), 0.0);
        for (const auto& f : folds) {
            for (std::size_t k = 0; k < m.mape.size(); ++k) m.mape[k] += f.test.mape.mape[k] / n;
        }
    }
    return m;
}

ParamRow parameter_row(const nn::ModelConfig& model) {
    ParamRow row;
    row.model = model;
    const nn::Network<float> net(model);
    for (const auto& spec : net.layout().specs) {
        std::size_t n = 1;
        for (int d : spec.shape) n *= static_cast<std::size_t>(d);
        row.measured += n;
        const auto prefix = spec.name.substr(0, spec.name.find('/'));
        if (row.breakdown.empty() || row.breakdown.back().first != prefix) row.breakdown.emplace_back(prefix, 0);
        row.breakdown.back().second += n;
    }
    row.reference = nn::reference_parameter_count(model);
    return row;
}

CellResult run_cell(const LoadedDataset& data, const nn::ModelConfig& model, EventClass task,
                    const BenchmarkConfig& config, const Logger& log) {
    CellResult cell;
    cell.model = model;
    cell.task = task;
    const std::string tag = model.name() + " / " + dataset::to_string(task);
    try {
        const auto plan = plan_task(data, task, config.seed);
        if (!plan.skip_reason.empty()) {
            cell.status = CellStatus::skipped;
            cell.message = plan.skip_reason;
            emit(log, tag + ": skipped (" + plan.skip_reason + ")");
            return cell;
        }
        cell.test_recordings = static_cast<int>(plan.test.size());
        for (std::size_t fold = 0; fold < plan.folds.size(); ++fold) {
            auto trained = train_fold(data, plan, model, fold, config, log);
            if (config.save_models) {
                const auto dir = config.output_dir / "models";
                std::filesystem::create_directories(dir);
                nn::save_checkpoint(dir / (model.slug() + "_" + dataset::to_string(task) + "_fold" +
                                           std::to_string(fold) + ".ckpt"),
                                    {trained.model, trained.training, trained.result.params,
                                     trained.result.optimizer, trained.result.history});
            }
            const auto probs = predict_records(data, plan.test, trained.model, trained.result.params, config.workers);
            FoldResult fr;
            fr.fold = static_cast<int>(fold);
            fr.train_recordings = trained.train_recordings;
            fr.validation_recordings = trained.validation_recordings;
            fr.epochs = static_cast<int>(trained.result.history.epochs.size());
            fr.best_epoch = trained.result.history.best_epoch;
            if (fr.best_epoch > 0)
                fr.best_validation_loss =
                    trained.result.history.epochs[static_cast<std::size_t>(fr.best_epoch - 1)].validation_loss;
            fr.train_seconds = trained.seconds;
            fr.test = evaluate_records(data, plan.test, probs, trained.model, task, config.postproc, config.workers);
            emit(log, tag + " fold " + std::to_string(fold) + ": segment F1 " + format_fixed(fr.test.segment.f1, 4) +
                          ", event F1 " + format_fixed(fr.test.event.f1, 4) + " (" + format_fixed(fr.train_seconds, 1) +
                          " s)");
            cell.folds.push_back(std::move(fr));
        }
        cell.mean = fold_mean(cell.folds);
    } catch (const Error& e) {
        cell.status = CellStatus::failed;
        cell.error_code = e.code();
        cell.message = e.what();
    } catch (const std::exception& e) {
        cell.status = CellStatus::failed;
        cell.error_code = "internal";
        cell.message = e.what();
    }
    if (cell.status == CellStatus::failed) {
        cell.folds.clear();
        emit(log, tag + ": failed (" + cell.error_code + ": " + cell.message + ")");
    }
    return cell;
}

ReportBundle run_benchmark(const BenchmarkConfig& config, const Logger& log) {
    const auto t0 = Clock::now();
    config.validate();
    std::set<std::string> slugs;
    for (const auto& m : config.models) {
        if (!slugs.insert(m.slug()).second)
            throw Error("config.duplicate_model", "model listed twice: " + m.name());
    }
    std::filesystem::create_directories(config.output_dir);

    ReportBundle bundle;
    bundle.tasks = config.tasks;
    for (const auto& m : config.models) bundle.params.push_back(parameter_row(m));

    const auto data = load_dataset(config, log);
    for (const auto& m : config.models) {
        for (auto task : config.tasks) bundle.cells.push_back(run_cell(data, m, task, config, log));
    }

    auto& md = bundle.metadata;
    md.seed = config.seed;
    md.version = kToolkitVersion;
    md.recordings = static_cast<int>(data.manifest.records.size());
    for (const auto& r : data.manifest.records) md.test_recordings += r.split == dataset::Split::test ? 1 : 0;
    md.featurize_seconds = data.featurize_seconds;
    md.warnings = data.warnings;
    md.cache_hits = data.cache_hits;
    md.cache_misses = data.cache_misses;
    md.total_seconds = seconds_since(t0);
    return bundle;
}

}  // namespace lungbench::bench
