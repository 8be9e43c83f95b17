#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "lungbench/nn/adam.hpp"
#include "lungbench/nn/model_config.hpp"
#include "lungbench/nn/parameters.hpp"
#include "lungbench/nn/trainer.hpp"

namespace lungbench::nn {

// Layout (little-endian):
//   "LBCKPT\0\0"  u32 version  u64 header_bytes  header (JSON)
//   f32 payload: all tensors in header order, then Adam m, then Adam v
//   u64 FNV-1a of every preceding byte
// The JSON header carries the model and training configs, tensor names and
// shapes, the Adam step count and the training history.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelConfig model;
    TrainingConfig training;
    ParameterSet params;
    std::optional<AdamState> optimizer;
    TrainingHistory history;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Throws "checkpoint.format" for a bad magic/version/layout and
// "checkpoint.checksum" when the trailer does not match.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lungbench::nn
