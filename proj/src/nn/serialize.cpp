#include "lungbench/nn/serialize.hpp"

#include "lungbench/common/error.hpp"

namespace lungbench::nn {

using nlohmann::json;

void to_json(json& j, const ModelConfig& c) {
    j = json{{"model", c.name()},
             {"hidden_size", c.hidden_size},
             {"recurrent_layers", c.recurrent_layers},
             {"dense_units", c.dense_units},
             {"cnn_channels", c.cnn_channels},
             {"cnn_pool_after", c.cnn_pool_after},
             {"input_features", c.input_features},
             {"seed", c.seed}};
}

void from_json(const json& j, ModelConfig& c) {
    if (j.contains("model")) {
        const auto name = j.at("model").get<std::string>();
        const auto parsed = parse_model_name(name);
        if (!parsed) throw Error("config.model", "unknown model: " + name);
        c.variant = parsed->variant;
        c.simp = parsed->simp;
    }
    c.hidden_size = j.value("hidden_size", c.hidden_size);
    c.recurrent_layers = j.value("recurrent_layers", c.recurrent_layers);
    c.dense_units = j.value("dense_units", c.dense_units);
    c.cnn_channels = j.value("cnn_channels", c.cnn_channels);
    c.cnn_pool_after = j.value("cnn_pool_after", c.cnn_pool_after);
    c.input_features = j.value("input_features", c.input_features);
    c.seed = j.value("seed", c.seed);
}

void to_json(json& j, const TrainingConfig& c) {
    j = json{{"initial_lr", c.initial_lr},
             {"lr_decay_factor", c.lr_decay_factor},
             {"plateau_patience", c.plateau_patience},
             {"early_stop_patience", c.early_stop_patience},
             {"batch_size", c.batch_size},
             {"max_epochs", c.max_epochs},
             {"workers", c.workers},
             {"seed", c.seed}};
}

void from_json(const json& j, TrainingConfig& c) {
    c.initial_lr = j.value("initial_lr", c.initial_lr);
    c.lr_decay_factor = j.value("lr_decay_factor", c.lr_decay_factor);
    c.plateau_patience = j.value("plateau_patience", c.plateau_patience);
    c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.workers = j.value("workers", c.workers);
    c.seed = j.value("seed", c.seed);
}

void to_json(json& j, const TrainingHistory& h) {
    json epochs = json::array();
    for (const auto& e : h.epochs) {
        epochs.push_back({{"epoch", e.epoch},
                          {"train_loss", e.train_loss},
                          {"validation_loss", e.validation_loss},
                          {"learning_rate", e.learning_rate},
                          {"best_validation_loss", e.best_validation_loss}});
    }
    j = json{{"epochs", epochs}, {"best_epoch", h.best_epoch}, {"early_stopped", h.early_stopped}};
}

void from_json(const json& j, TrainingHistory& h) {
    h = {};
    for (const auto& e : j.value("epochs", json::array())) {
        EpochRecord r;
        r.epoch = e.at("epoch").get<int>();
        r.train_loss = e.at("train_loss").get<double>();
        r.validation_loss = e.at("validation_loss").get<double>();
        r.learning_rate = e.at("learning_rate").get<double>();
        r.best_validation_loss = e.at("best_validation_loss").get<double>();
        h.epochs.push_back(r);
    }
    h.best_epoch = j.value("best_epoch", 0);
    h.early_stopped = j.value("early_stopped", false);
}

}  // namespace lungbench::nn
