#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lungbench/common/matrix.hpp"
#include "lungbench/nn/adam.hpp"
#include "lungbench/nn/model_config.hpp"
#include "lungbench/nn/parameters.hpp"

namespace lungbench::nn {

struct TrainingConfig {
    double initial_lr = 1e-4;
    double lr_decay_factor = 0.2;
    int plateau_patience = 10;
    int early_stop_patience = 50;
    int batch_size = 32;
    int max_epochs = 500;
    int workers = 1;
    std::uint64_t seed = 0;  // mini-batch order

    void validate() const;
};

// Validation-loss bookkeeping for plateau decay and early stopping. An epoch
// improves when its loss is strictly below the best so far; each
// non-improving epoch advances both waits. The plateau wait resets after a
// decay, the early-stop wait only on improvement.
class PlateauSchedule {
public:
    explicit PlateauSchedule(const TrainingConfig& config);

    struct Step {
        bool improved = false;
        bool decayed = false;
        bool stop = false;
    };

    Step observe(double validation_loss);

    double learning_rate() const { return lr_; }
    double best() const { return best_; }
    int epochs_since_improvement() const { return stall_; }

private:
    double lr_;
    double factor_;
    int plateau_patience_;
    int stop_patience_;
    double best_;
    int plateau_wait_ = 0;
    int stall_ = 0;
};

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double validation_loss = 0.0;
    double learning_rate = 0.0;  // rate used during this epoch
    double best_validation_loss = 0.0;
};

struct TrainingHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    bool early_stopped = false;
};

struct Example {
    std::shared_ptr<const RowMatrixF> features;
    std::vector<std::uint8_t> targets;
};

struct TrainingHooks {
    // Replaces the measured validation loss of an epoch (schedule tests).
    std::function<double(int epoch, double measured)> validation_override;
    std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
    ParameterSet params;  // weights of the best validation epoch
    TrainingHistory history;
    AdamState optimizer;  // state after the final epoch
};

// Mini-batch Adam on the mean per-recording BCE. Validation loss is the mean
// over `validation`; with an empty validation set the training loss drives
// the schedule. Throws "train.empty" without training data and
// "train.divergence" on a non-finite loss.
TrainResult train_model(const ModelConfig& config, const TrainingConfig& tcfg, const std::vector<Example>& train,
                        const std::vector<Example>& validation, const TrainingHooks& hooks = {});

// Mean loss of `params` over examples, reduced in index order.
double mean_loss(const ModelConfig& config, const ParameterSet& params, const std::vector<Example>& examples,
                 int workers);

}  // namespace lungbench::nn
