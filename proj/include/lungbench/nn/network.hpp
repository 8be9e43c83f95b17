#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lungbench/common/matrix.hpp"
#include "lungbench/nn/layers.hpp"
#include "lungbench/nn/model_config.hpp"
#include "lungbench/nn/parameters.hpp"

namespace lungbench::nn {

inline constexpr double kProbabilityClamp = 1e-7;

// Mean over frames of -[t log p + (1-t) log(1-p)], p clamped to
// [1e-7, 1 - 1e-7].
template <class S>
S bce_loss(std::span<const S> probs, std::span<const std::uint8_t> targets);

// Layer stack of one ModelConfig. Stateless apart from the topology, so a
// single instance may serve concurrent forward/backward calls.
template <class S>
class Network {
public:
    explicit Network(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    const ParameterLayout& layout() const { return layout_; }

    BasicParameterSet<S> init_parameters() const;

    // Per-frame sigmoid outputs: input frames for recurrent-only variants,
    // ceil(frames / 2) with a CNN front.
    std::vector<S> forward(const BasicParameterSet<S>& params, const RowMatrix<S>& features) const;

    std::vector<S> logits(const BasicParameterSet<S>& params, const RowMatrix<S>& features,
                          std::vector<std::int64_t>* pattern = nullptr) const;

    // Returns the BCE loss and adds dLoss/dParams into `grads` (which must
    // share the parameter layout).
    S loss_and_gradients(const BasicParameterSet<S>& params, const RowMatrix<S>& features,
                         std::span<const std::uint8_t> targets, BasicParameterSet<S>& grads) const;

    S loss(const BasicParameterSet<S>& params, const RowMatrix<S>& features,
           std::span<const std::uint8_t> targets) const;

private:
    void check_input(const RowMatrix<S>& features) const;

    ModelConfig config_;
    ParameterLayout layout_;
    std::vector<std::unique_ptr<Layer<S>>> layers_;
};

ParameterSet init_parameters(const ModelConfig& config);

// Single-precision forward pass of a full model.
std::vector<float> forward(const ModelConfig& config, const ParameterSet& params, const RowMatrixF& features);

// Gradients of the BCE loss, same layout as params.
ParameterSet gradients(const ModelConfig& config, const ParameterSet& params, const RowMatrixF& features,
                       std::span<const std::uint8_t> targets, float* loss_out = nullptr);

}  // namespace lungbench::nn
