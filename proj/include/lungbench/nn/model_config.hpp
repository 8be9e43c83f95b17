#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lungbench/common/constants.hpp"

namespace lungbench::nn {

enum class Variant { LSTM, GRU, BiLSTM, BiGRU, CNN_LSTM, CNN_GRU, CNN_BiLSTM, CNN_BiGRU };

enum class CellType { lstm, gru };

// Layer stack shared by all variants:
//   [conv 3x3 + ReLU]* with one 2x2 max-pool   (CNN variants only)
//   recurrent x recurrent_layers (bidirectional ones concatenate directions)
//   dense(dense_units) + ReLU
//   dense(1) + sigmoid
// The defaults reproduce the trainable-parameter counts of the reference
// benchmark tables for all twelve variants.
struct ModelConfig {
    Variant variant = Variant::LSTM;
    bool simp = false;          // halves the recurrent cell count (bidirectional only)
    int hidden_size = 128;      // cells per direction before SIMP halving
    int recurrent_layers = 2;
    int dense_units = 32;
    std::vector<int> cnn_channels = {8, 48, 64, 64};
    int cnn_pool_after = 0;     // index of the conv layer followed by the max-pool
    int input_features = kFeatureColumns;
    std::uint64_t seed = 0;

    bool bidirectional() const;
    bool has_cnn() const;
    CellType cell() const;
    int cells() const { return simp ? hidden_size / 2 : hidden_size; }

    // Output frames for an input of `steps` frames (CNN variants halve).
    int output_steps(int steps) const { return has_cnn() ? (steps + 1) / 2 : steps; }

    std::string name() const;  // "SIMP CNN-BiGRU"
    std::string slug() const;  // "simp_cnn_bigru"

    void validate() const;
};

// Accepts display names ("CNN-BiGRU", "SIMP BiLSTM") and slugs
// ("cnn_bigru", "simp_bilstm"), case-insensitively.
std::optional<ModelConfig> parse_model_name(std::string_view name);

std::vector<ModelConfig> all_benchmark_variants();

// Trainable-parameter counts listed by the benchmark tables; nullopt for
// configurations outside the twelve reference variants.
std::optional<std::size_t> reference_parameter_count(const ModelConfig& config);

}  // namespace lungbench::nn
