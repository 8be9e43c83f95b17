#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lungbench/dataset/labels.hpp"
#include "lungbench/nn/model_config.hpp"
#include "lungbench/nn/trainer.hpp"
#include "lungbench/postproc/events.hpp"

namespace lungbench::bench {

// JSON config file (every key optional):
//   manifest      path of the dataset manifest             ("manifest.tsv")
//   output_dir    report directory                          ("lungbench_out")
//   cache_dir     feature cache, empty = <output_dir>/cache ("")
//   tasks         subset of ["I", "E", "C", "D"]            (["I"])
//   models        names ("CNN-BiGRU") or objects with a "model" name
//                 and ModelConfig overrides                 (all twelve)
//   postproc      {threshold, merge_gap, peak_tolerance, min_duration, merge}
//   training      {initial_lr, lr_decay_factor, plateau_patience,
//                  early_stop_patience, batch_size, max_epochs, workers, seed}
//   seed          fold assignment and model initialization  (0)
//   workers       featurization and evaluation threads      (1)
//   save_models   write one checkpoint per trained fold     (true)
// Relative paths resolve against the config file's directory.
struct BenchmarkConfig {
    std::filesystem::path manifest = "manifest.tsv";
    std::filesystem::path output_dir = "lungbench_out";
    std::filesystem::path cache_dir;
    std::vector<dataset::EventClass> tasks = {dataset::EventClass::I};
    std::vector<nn::ModelConfig> models = nn::all_benchmark_variants();
    postproc::PostprocConfig postproc;
    nn::TrainingConfig training;
    std::uint64_t seed = 0;
    int workers = 1;
    bool save_models = true;

    std::filesystem::path resolved_cache_dir() const {
        return cache_dir.empty() ? output_dir / "cache" : cache_dir;
    }
    void validate() const;
};

// Only I, E, C and D are benchmark tasks.
dataset::EventClass parse_task(std::string_view token);

void to_json(nlohmann::json& j, const BenchmarkConfig& c);
void from_json(const nlohmann::json& j, BenchmarkConfig& c);

BenchmarkConfig load_config(const std::filesystem::path& path);

}  // namespace lungbench::bench
