#include "lungbench/nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "lungbench/common/error.hpp"

namespace lungbench::nn {

template <class S>
S bce_loss(std::span<const S> probs, std::span<const std::uint8_t> targets) {
    if (probs.size() != targets.size() || probs.empty()) throw Error("nn.shape", "loss input size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = std::clamp(static_cast<double>(probs[i]), kProbabilityClamp, 1.0 - kProbabilityClamp);
        sum -= targets[i] ? std::log(p) : std::log(1.0 - p);
    }
    return static_cast<S>(sum / static_cast<double>(probs.size()));
}

template <class S>
Network<S>::Network(const ModelConfig& config) : config_(config) {
    config_.validate();
    int width = config_.input_features;
    if (config_.has_cnn()) {
        int freq = config_.input_features;
        int channels = 1;
        for (std::size_t i = 0; i < config_.cnn_channels.size(); ++i) {
            const int out = config_.cnn_channels[i];
            layers_.push_back(std::make_unique<Conv2D<S>>(layout_, "conv" + std::to_string(i), freq, channels, out));
            layers_.push_back(std::make_unique<Relu<S>>(freq * out));
            channels = out;
            if (static_cast<int>(i) == config_.cnn_pool_after) {
                layers_.push_back(std::make_unique<MaxPool2x2<S>>(freq, channels));
                freq = (freq + 1) / 2;
            }
        }
        width = freq * channels;
    }
    for (int i = 0; i < config_.recurrent_layers; ++i) {
        const std::string name = "rnn" + std::to_string(i);
        if (config_.bidirectional()) {
            layers_.push_back(std::make_unique<Bidirectional<S>>(layout_, name, config_.cell(), width, config_.cells()));
        } else {
            layers_.push_back(
                std::make_unique<Recurrent<S>>(layout_, name + "/", config_.cell(), width, config_.cells(), false));
        }
        width = layers_.back()->output_width();
    }
    layers_.push_back(std::make_unique<Dense<S>>(layout_, "dense0", width, config_.dense_units));
    layers_.push_back(std::make_unique<Relu<S>>(config_.dense_units));
    layers_.push_back(std::make_unique<Dense<S>>(layout_, "output", config_.dense_units, 1));
}

template <class S>
BasicParameterSet<S> Network<S>::init_parameters() const {
    return initialize<S>(layout_, config_.seed);
}

template <class S>
void Network<S>::check_input(const RowMatrix<S>& features) const {
    if (features.cols() != config_.input_features || features.rows() < 1) {
        throw Error("nn.shape", "expected " + std::to_string(config_.input_features) + " feature columns, got " +
                                    std::to_string(features.cols()));
    }
}

template <class S>
std::vector<S> Network<S>::logits(const BasicParameterSet<S>& params, const RowMatrix<S>& features,
                                  std::vector<std::int64_t>* pattern) const {
    check_input(features);
    RowMatrix<S> x = features;
    std::unique_ptr<LayerState> state;
    for (const auto& layer : layers_) {
        x = layer->forward(params, x, pattern ? &state : nullptr);
        if (pattern) state->append_pattern(*pattern);
    }
    return std::vector<S>(x.data(), x.data() + x.size());
}

template <class S>
std::vector<S> Network<S>::forward(const BasicParameterSet<S>& params, const RowMatrix<S>& features) const {
    auto out = logits(params, features);
    for (auto& v : out) v = S(1) / (S(1) + std::exp(-v));
    return out;
}

template <class S>
S Network<S>::loss_and_gradients(const BasicParameterSet<S>& params, const RowMatrix<S>& features,
                                 std::span<const std::uint8_t> targets, BasicParameterSet<S>& grads) const {
    check_input(features);
    const auto steps = static_cast<std::size_t>(config_.output_steps(static_cast<int>(features.rows())));
    if (targets.size() != steps) {
        throw Error("nn.shape", "expected " + std::to_string(steps) + " targets, got " + std::to_string(targets.size()));
    }
    std::vector<std::unique_ptr<LayerState>> states(layers_.size());
    RowMatrix<S> x = features;
    for (std::size_t i = 0; i < layers_.size(); ++i) x = layers_[i]->forward(params, x, &states[i]);

    std::vector<S> probs(steps);
    RowMatrix<S> dy(static_cast<Eigen::Index>(steps), 1);
    for (std::size_t t = 0; t < steps; ++t) {
        const S p = S(1) / (S(1) + std::exp(-x(static_cast<Eigen::Index>(t), 0)));
        probs[t] = p;
        const bool clamped = p < S(kProbabilityClamp) || p > S(1.0 - kProbabilityClamp);
        dy(static_cast<Eigen::Index>(t), 0) =
            clamped ? S(0) : (p - static_cast<S>(targets[t])) / static_cast<S>(steps);
    }
    for (std::size_t i = layers_.size(); i-- > 0;) dy = layers_[i]->backward(params, *states[i], dy, grads);
    return bce_loss<S>(probs, targets);
}

template <class S>
S Network<S>::loss(const BasicParameterSet<S>& params, const RowMatrix<S>& features,
                   std::span<const std::uint8_t> targets) const {
    const auto probs = forward(params, features);
    return bce_loss<S>(probs, targets);
}

template float bce_loss<float>(std::span<const float>, std::span<const std::uint8_t>);
template double bce_loss<double>(std::span<const double>, std::span<const std::uint8_t>);
template class Network<float>;
template class Network<double>;

ParameterSet init_parameters(const ModelConfig& config) { return Network<float>(config).init_parameters(); }

std::vector<float> forward(const ModelConfig& config, const ParameterSet& params, const RowMatrixF& features) {
    return Network<float>(config).forward(params, features);
}

ParameterSet gradients(const ModelConfig& config, const ParameterSet& params, const RowMatrixF& features,
                       std::span<const std::uint8_t> targets, float* loss_out) {
    Network<float> net(config);
    ParameterSet grads = params.zeros_like();
    const float loss = net.loss_and_gradients(params, features, targets, grads);
    if (loss_out) *loss_out = loss;
    return grads;
}

}  // namespace lungbench::nn
