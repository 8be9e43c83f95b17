#pragma once

#include <json.hpp>

#include "lungbench/nn/model_config.hpp"
#include "lungbench/nn/trainer.hpp"

namespace lungbench::nn {

// JSON forms used by checkpoints and config files. Readers start from the
// defaults and override the keys present.
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
void to_json(nlohmann::json& j, const TrainingConfig& c);
void from_json(const nlohmann::json& j, TrainingConfig& c);
void to_json(nlohmann::json& j, const TrainingHistory& h);
void from_json(const nlohmann::json& j, TrainingHistory& h);

}  // namespace lungbench::nn
