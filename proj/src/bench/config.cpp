#include "lungbench/bench/config.hpp"

#include <fstream>

#include "lungbench/common/error.hpp"
#include "lungbench/nn/serialize.hpp"

namespace lungbench::bench {

using nlohmann::json;

namespace postproc_json {

json dump(const postproc::PostprocConfig& c) {
    return {{"threshold", c.threshold},
            {"merge_gap", c.merge_gap},
            {"peak_tolerance", c.peak_tolerance},
            {"min_duration", c.min_duration},
            {"merge", c.merge}};
}

postproc::PostprocConfig read(const json& j) {
    postproc::PostprocConfig c;
    c.threshold = j.value("threshold", c.threshold);
    c.merge_gap = j.value("merge_gap", c.merge_gap);
    c.peak_tolerance = j.value("peak_tolerance", c.peak_tolerance);
    c.min_duration = j.value("min_duration", c.min_duration);
    c.merge = j.value("merge", c.merge);
    return c;
}

}  // namespace postproc_json

dataset::EventClass parse_task(std::string_view token) {
    const auto k = dataset::parse_event_class(token);
    using dataset::EventClass;
    if (!k || !(*k == EventClass::I || *k == EventClass::E || *k == EventClass::C || *k == EventClass::D))
        throw Error("config.task", "unknown task '" + std::string(token) + "' (expected I, E, C or D)");
    return *k;
}

void BenchmarkConfig::validate() const {
    if (workers < 1) throw Error("config.workers", "workers must be at least 1");
    if (tasks.empty()) throw Error("config.task", "task list is empty");
    for (const auto& m : models) m.validate();
    postproc.validate();
    training.validate();
}

void to_json(json& j, const BenchmarkConfig& c) {
    json tasks = json::array();
    for (auto t : c.tasks) tasks.push_back(dataset::to_string(t));
    json models = json::array();
    for (const auto& m : c.models) models.push_back(m);
    j = {{"manifest", c.manifest.string()},
         {"output_dir", c.output_dir.string()},
         {"cache_dir", c.cache_dir.string()},
         {"tasks", tasks},
         {"models", models},
         {"postproc", postproc_json::dump(c.postproc)},
         {"training", c.training},
         {"seed", c.seed},
         {"workers", c.workers},
         {"save_models", c.save_models}};
}

void from_json(const json& j, BenchmarkConfig& c) {
    if (!j.is_object()) throw Error("config.format", "config must be a JSON object");
    try {
        if (j.contains("manifest")) c.manifest = j.at("manifest").get<std::string>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
        if (j.contains("tasks")) {
            c.tasks.clear();
            for (const auto& t : j.at("tasks")) c.tasks.push_back(parse_task(t.get<std::string>()));
        }
        if (j.contains("models")) {
            c.models.clear();
            for (const auto& m : j.at("models")) {
                if (m.is_string()) c.models.push_back(json{{"model", m}}.get<nn::ModelConfig>());
                else c.models.push_back(m.get<nn::ModelConfig>());
            }
        }
        if (j.contains("postproc")) c.postproc = postproc_json::read(j.at("postproc"));
        if (j.contains("training")) c.training = j.at("training").get<nn::TrainingConfig>();
        c.seed = j.value("seed", c.seed);
        c.workers = j.value("workers", c.workers);
        c.save_models = j.value("save_models", c.save_models);
    } catch (const json::exception& e) {
        throw Error("config.format", e.what());
    }
}

BenchmarkConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("config.missing", "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("config.format", path.string() + ": " + e.what());
    }
    BenchmarkConfig c = j.get<BenchmarkConfig>();
    const auto base = path.parent_path();
    auto resolve = [&](std::filesystem::path& p) {
        if (!p.empty() && p.is_relative()) p = base / p;
    };
    resolve(c.manifest);
    resolve(c.output_dir);
    resolve(c.cache_dir);
    c.validate();
    return c;
}

}  // namespace lungbench::bench
