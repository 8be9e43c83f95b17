#include "lungbench/nn/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "lungbench/common/error.hpp"
#include "lungbench/common/parallel.hpp"
#include "lungbench/common/random.hpp"
#include "lungbench/nn/network.hpp"

namespace lungbench::nn {

void TrainingConfig::validate() const {
    if (!(initial_lr > 0.0)) throw Error("train.config", "initial_lr must be positive");
    if (!(lr_decay_factor > 0.0 && lr_decay_factor < 1.0)) {
        throw Error("train.config", "lr_decay_factor must lie in (0, 1)");
    }
    if (plateau_patience < 1 || plateau_patience >= early_stop_patience) {
        throw Error("train.config", "plateau_patience must be positive and below early_stop_patience");
    }
    if (batch_size < 1) throw Error("train.config", "batch_size must be positive");
    if (max_epochs < 1) throw Error("train.config", "max_epochs must be positive");
}

PlateauSchedule::PlateauSchedule(const TrainingConfig& config)
    : lr_(config.initial_lr),
      factor_(config.lr_decay_factor),
      plateau_patience_(config.plateau_patience),
      stop_patience_(config.early_stop_patience),
      best_(std::numeric_limits<double>::infinity()) {}

PlateauSchedule::Step PlateauSchedule::observe(double validation_loss) {
    Step step;
    if (validation_loss < best_) {
        best_ = validation_loss;
        plateau_wait_ = 0;
        stall_ = 0;
        step.improved = true;
        return step;
    }
    ++plateau_wait_;
    ++stall_;
    if (plateau_wait_ >= plateau_patience_) {
        lr_ *= factor_;
        plateau_wait_ = 0;
        step.decayed = true;
    }
    step.stop = stall_ >= stop_patience_;
    return step;
}

double mean_loss(const ModelConfig& config, const ParameterSet& params, const std::vector<Example>& examples,
                 int workers) {
    if (examples.empty()) return 0.0;
    const Network<float> net(config);
    std::vector<double> losses(examples.size());
    parallel_for(examples.size(), workers, [&](std::size_t i) {
        losses[i] = static_cast<double>(net.loss(params, *examples[i].features, examples[i].targets));
    });
    double sum = 0.0;
    for (double l : losses) sum += l;
    return sum / static_cast<double>(losses.size());
}

TrainResult train_model(const ModelConfig& config, const TrainingConfig& tcfg, const std::vector<Example>& train,
                        const std::vector<Example>& validation, const TrainingHooks& hooks) {
    tcfg.validate();
    if (train.empty()) throw Error("train.empty", "training set is empty");
    const Network<float> net(config);
    ParameterSet params = net.init_parameters();
    AdamState adam = AdamState::fresh(params);
    PlateauSchedule schedule(tcfg);
    TrainResult result{params, {}, {}};
    Rng rng(mix_seed(tcfg.seed, 0x7EA1));

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const int workers = std::max(1, tcfg.workers);
    std::vector<ParameterSet> partial(static_cast<std::size_t>(workers), params.zeros_like());
    std::vector<double> partial_loss(static_cast<std::size_t>(workers));
    ParameterSet grads = params.zeros_like();

    for (int epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
        const double lr = schedule.learning_rate();
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(tcfg.batch_size)) {
            const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(tcfg.batch_size));
            const std::size_t count = end - begin;
            const std::size_t chunks = std::min<std::size_t>(count, static_cast<std::size_t>(workers));
            // Contiguous chunks reduced in chunk order keep the sum independent of thread timing.
            parallel_for(chunks, workers, [&](std::size_t w) {
                partial[w].set_zero();
                partial_loss[w] = 0.0;
                const std::size_t lo = begin + count * w / chunks;
                const std::size_t hi = begin + count * (w + 1) / chunks;
                for (std::size_t k = lo; k < hi; ++k) {
                    const Example& ex = train[order[k]];
                    partial_loss[w] += static_cast<double>(
                        net.loss_and_gradients(params, *ex.features, ex.targets, partial[w]));
                }
            });
            grads.set_zero();
            for (std::size_t w = 0; w < chunks; ++w) {
                grads.add_scaled(partial[w], 1.0f);
                loss_sum += partial_loss[w];
            }
            if (!std::isfinite(loss_sum)) throw Error("train.divergence", "non-finite training loss");
            for (auto& t : grads.tensors) {
                for (auto& g : t.values) g /= static_cast<float>(count);
            }
            adam_update(params, grads, adam, lr);
        }

        EpochRecord record;
        record.epoch = epoch;
        record.learning_rate = lr;
        record.train_loss = loss_sum / static_cast<double>(train.size());
        record.validation_loss = validation.empty() ? record.train_loss : mean_loss(config, params, validation, workers);
        if (hooks.validation_override) record.validation_loss = hooks.validation_override(epoch, record.validation_loss);
        if (!std::isfinite(record.validation_loss)) throw Error("train.divergence", "non-finite validation loss");

        const auto step = schedule.observe(record.validation_loss);
        if (step.improved) {
            result.params = params;
            result.history.best_epoch = epoch;
        }
        record.best_validation_loss = schedule.best();
        result.history.epochs.push_back(record);
        if (hooks.on_epoch) hooks.on_epoch(record);
        if (step.stop) {
            result.history.early_stopped = true;
            break;
        }
    }
    result.optimizer = std::move(adam);
    return result;
}

}  // namespace lungbench::nn
