#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lungbench/common/matrix.hpp"
#include "lungbench/common/random.hpp"
#include "lungbench/nn/model_config.hpp"
#include "lungbench/nn/parameters.hpp"

namespace lungbench::nn {

// Sequences are (steps x width) row-major matrices. Convolutional layers
// read each row as a (frequency x channel) grid flattened frequency-major.

enum class InitKind { glorot_uniform, zeros, lstm_bias };

struct TensorSpec {
    std::string name;
    std::vector<int> shape;
    InitKind init = InitKind::zeros;
    int fan_in = 0;
    int fan_out = 0;
};

struct ParameterLayout {
    std::vector<TensorSpec> specs;

    std::size_t add(TensorSpec spec) {
        specs.push_back(std::move(spec));
        return specs.size() - 1;
    }
};

// Glorot-uniform kernels (limit sqrt(6 / (fan_in + fan_out))), zero biases,
// LSTM forget-gate biases one. Tensors are drawn in layout order from one
// stream seeded by `seed`.
template <class S>
BasicParameterSet<S> initialize(const ParameterLayout& layout, std::uint64_t seed);

// Cached activations of one forward pass through one layer.
struct LayerState {
    virtual ~LayerState() = default;
    // Discrete branch decisions (ReLU signs, pooling winners). Finite
    // differences are only meaningful while this stays fixed.
    virtual void append_pattern(std::vector<std::int64_t>&) const {}
};

template <class S>
class Layer {
public:
    virtual ~Layer() = default;

    virtual int output_width() const = 0;
    virtual int output_steps(int steps) const { return steps; }

    // When `state` is non-null the activations needed by backward() are kept.
    virtual RowMatrix<S> forward(const BasicParameterSet<S>& params, const RowMatrix<S>& x,
                                 std::unique_ptr<LayerState>* state) const = 0;

    // Accumulates parameter gradients into `grads` and returns dL/dx.
    virtual RowMatrix<S> backward(const BasicParameterSet<S>& params, const LayerState& state,
                                  const RowMatrix<S>& dy, BasicParameterSet<S>& grads) const = 0;
};

// Time-distributed affine map.
template <class S>
class Dense final : public Layer<S> {
public:
    Dense(ParameterLayout& layout, const std::string& name, int in, int out);
    int output_width() const override { return out_; }
    RowMatrix<S> forward(const BasicParameterSet<S>&, const RowMatrix<S>&, std::unique_ptr<LayerState>*) const override;
    RowMatrix<S> backward(const BasicParameterSet<S>&, const LayerState&, const RowMatrix<S>&,
                          BasicParameterSet<S>&) const override;

private:
    int in_, out_;
    std::size_t kernel_, bias_;
};

template <class S>
class Relu final : public Layer<S> {
public:
    explicit Relu(int width) : width_(width) {}
    int output_width() const override { return width_; }
    RowMatrix<S> forward(const BasicParameterSet<S>&, const RowMatrix<S>&, std::unique_ptr<LayerState>*) const override;
    RowMatrix<S> backward(const BasicParameterSet<S>&, const LayerState&, const RowMatrix<S>&,
                          BasicParameterSet<S>&) const override;

private:
    int width_;
};

// 3x3 convolution over (time x frequency), zero "same" padding, stride 1.
// Kernel layout [3][3][in_channels][out_channels].
template <class S>
class Conv2D final : public Layer<S> {
public:
    Conv2D(ParameterLayout& layout, const std::string& name, int freq, int in_channels, int out_channels);
    int output_width() const override { return freq_ * cout_; }
    RowMatrix<S> forward(const BasicParameterSet<S>&, const RowMatrix<S>&, std::unique_ptr<LayerState>*) const override;
    RowMatrix<S> backward(const BasicParameterSet<S>&, const LayerState&, const RowMatrix<S>&,
                          BasicParameterSet<S>&) const override;

private:
    int freq_, cin_, cout_;
    std::size_t kernel_, bias_;
};

// 2x2 max pooling over (time x frequency) with "same" padding: odd edges
// pool a partial window, so output dims are ceil(n / 2).
template <class S>
class MaxPool2x2 final : public Layer<S> {
public:
    MaxPool2x2(int freq, int channels) : freq_(freq), channels_(channels) {}
    int output_width() const override { return ((freq_ + 1) / 2) * channels_; }
    int output_steps(int steps) const override { return (steps + 1) / 2; }
    RowMatrix<S> forward(const BasicParameterSet<S>&, const RowMatrix<S>&, std::unique_ptr<LayerState>*) const override;
    RowMatrix<S> backward(const BasicParameterSet<S>&, const LayerState&, const RowMatrix<S>&,
                          BasicParameterSet<S>&) const override;

private:
    int freq_, channels_;
};

// One recurrent direction returning the full hidden sequence.
//   LSTM: gates i, f, c, o; kernel [in][4h], recurrent_kernel [h][4h], bias [4h].
//   GRU:  gates z, r, n with the reset gate applied after the recurrent
//         product; kernel [in][3h], recurrent_kernel [h][3h], bias [2][3h]
//         (input bias row, recurrent bias row); h' = z*h + (1-z)*n.
// A reversed layer consumes the sequence back to front and emits its
// outputs in the original time order.
template <class S>
class Recurrent final : public Layer<S> {
public:
    Recurrent(ParameterLayout& layout, const std::string& name, CellType cell, int in, int hidden, bool reversed);
    int output_width() const override { return hidden_; }
    RowMatrix<S> forward(const BasicParameterSet<S>&, const RowMatrix<S>&, std::unique_ptr<LayerState>*) const override;
    RowMatrix<S> backward(const BasicParameterSet<S>&, const LayerState&, const RowMatrix<S>&,
                          BasicParameterSet<S>&) const override;

private:
    RowMatrix<S> forward_lstm(const BasicParameterSet<S>&, const RowMatrix<S>&, std::unique_ptr<LayerState>*) const;
    RowMatrix<S> forward_gru(const BasicParameterSet<S>&, const RowMatrix<S>&, std::unique_ptr<LayerState>*) const;
    RowMatrix<S> backward_lstm(const BasicParameterSet<S>&, const LayerState&, const RowMatrix<S>&,
                               BasicParameterSet<S>&) const;
    RowMatrix<S> backward_gru(const BasicParameterSet<S>&, const LayerState&, const RowMatrix<S>&,
                              BasicParameterSet<S>&) const;

    CellType cell_;
    int in_, hidden_;
    bool reversed_;
    std::size_t kernel_, recurrent_, bias_;
};

// Forward and reversed directions, outputs concatenated [forward, backward].
template <class S>
class Bidirectional final : public Layer<S> {
public:
    Bidirectional(ParameterLayout& layout, const std::string& name, CellType cell, int in, int hidden);
    int output_width() const override { return 2 * hidden_; }
    RowMatrix<S> forward(const BasicParameterSet<S>&, const RowMatrix<S>&, std::unique_ptr<LayerState>*) const override;
    RowMatrix<S> backward(const BasicParameterSet<S>&, const LayerState&, const RowMatrix<S>&,
                          BasicParameterSet<S>&) const override;

private:
    int hidden_;
    Recurrent<S> forward_dir_;
    Recurrent<S> backward_dir_;
};

}  // namespace lungbench::nn
