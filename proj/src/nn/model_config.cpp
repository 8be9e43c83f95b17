#include "lungbench/nn/model_config.hpp"

#include <algorithm>
#include <cctype>

#include "lungbench/common/error.hpp"

namespace lungbench::nn {

namespace {

struct VariantInfo {
    Variant variant;
    const char* name;
    bool bidirectional;
    bool cnn;
    CellType cell;
};

constexpr VariantInfo kVariants[] = {
    {Variant::LSTM, "LSTM", false, false, CellType::lstm},
    {Variant::GRU, "GRU", false, false, CellType::gru},
    {Variant::BiLSTM, "BiLSTM", true, false, CellType::lstm},
    {Variant::BiGRU, "BiGRU", true, false, CellType::gru},
    {Variant::CNN_LSTM, "CNN-LSTM", false, true, CellType::lstm},
    {Variant::CNN_GRU, "CNN-GRU", false, true, CellType::gru},
    {Variant::CNN_BiLSTM, "CNN-BiLSTM", true, true, CellType::lstm},
    {Variant::CNN_BiGRU, "CNN-BiGRU", true, true, CellType::gru},
};

const VariantInfo& info(Variant v) {
    for (const auto& i : kVariants) {
        if (i.variant == v) return i;
    }
    throw Error("model.variant", "unknown variant");
}

std::string normalize(std::string_view s) {
    std::string out;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (c == '-' || c == '_' || c == ' ') {
            out += '_';
        } else {
            out += static_cast<char>(std::tolower(u));
        }
    }
    return out;
}

struct Reference {
    Variant variant;
    bool simp;
    std::size_t count;
};

constexpr Reference kReferenceCounts[] = {
    {Variant::LSTM, false, 300609},          {Variant::GRU, false, 227265},
    {Variant::BiLSTM, false, 732225},        {Variant::BiGRU, false, 552769},
    {Variant::CNN_LSTM, false, 3448513},     {Variant::CNN_GRU, false, 2605249},
    {Variant::CNN_BiLSTM, false, 6959809},   {Variant::CNN_BiGRU, false, 5240513},
    {Variant::BiLSTM, true, 235073},         {Variant::BiGRU, true, 178113},
    {Variant::CNN_BiLSTM, true, 3382977},    {Variant::CNN_BiGRU, true, 2556097},
};

}  // namespace

bool ModelConfig::bidirectional() const { return info(variant).bidirectional; }
bool ModelConfig::has_cnn() const { return info(variant).cnn; }
CellType ModelConfig::cell() const { return info(variant).cell; }

std::string ModelConfig::name() const {
    return (simp ? std::string("SIMP ") : std::string()) + info(variant).name;
}

std::string ModelConfig::slug() const { return normalize(name()); }

void ModelConfig::validate() const {
    if (simp && !bidirectional()) throw Error("model.config", "SIMP applies to bidirectional variants only");
    if (cells() < 1) throw Error("model.config", "hidden size must be positive");
    if (recurrent_layers < 1) throw Error("model.config", "at least one recurrent layer required");
    if (dense_units < 1) throw Error("model.config", "dense units must be positive");
    if (input_features < 1) throw Error("model.config", "input features must be positive");
    if (has_cnn()) {
        if (cnn_channels.empty()) throw Error("model.config", "CNN variants need conv channels");
        if (std::any_of(cnn_channels.begin(), cnn_channels.end(), [](int c) { return c < 1; })) {
            throw Error("model.config", "conv channels must be positive");
        }
        if (cnn_pool_after < 0 || cnn_pool_after >= static_cast<int>(cnn_channels.size())) {
            throw Error("model.config", "pool position out of range");
        }
    }
}

std::optional<ModelConfig> parse_model_name(std::string_view name) {
    std::string key = normalize(name);
    ModelConfig config;
    if (key.rfind("simp_", 0) == 0) {
        config.simp = true;
        key = key.substr(5);
    }
    for (const auto& i : kVariants) {
        if (normalize(i.name) == key) {
            config.variant = i.variant;
            if (config.simp && !i.bidirectional) return std::nullopt;
            return config;
        }
    }
    return std::nullopt;
}

std::vector<ModelConfig> all_benchmark_variants() {
    std::vector<ModelConfig> out;
    for (const auto& i : kVariants) {
        ModelConfig c;
        c.variant = i.variant;
        out.push_back(c);
    }
    for (const auto& i : kVariants) {
        if (!i.bidirectional) continue;
        ModelConfig c;
        c.variant = i.variant;
        c.simp = true;
        out.push_back(c);
    }
    return out;
}

std::optional<std::size_t> reference_parameter_count(const ModelConfig& config) {
    const ModelConfig defaults;
    if (config.hidden_size != defaults.hidden_size || config.recurrent_layers != defaults.recurrent_layers ||
        config.dense_units != defaults.dense_units || config.input_features != defaults.input_features) {
        return std::nullopt;
    }
    if (config.has_cnn() &&
        (config.cnn_channels != defaults.cnn_channels || config.cnn_pool_after != defaults.cnn_pool_after)) {
        return std::nullopt;
    }
    for (const auto& r : kReferenceCounts) {
        if (r.variant == config.variant && r.simp == config.simp) return r.count;
    }
    return std::nullopt;
}

}  // namespace lungbench::nn
