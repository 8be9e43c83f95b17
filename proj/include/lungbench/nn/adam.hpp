#pragma once

#include <cstdint>

#include "lungbench/nn/parameters.hpp"

namespace lungbench::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <class S>
struct BasicAdamState {
    BasicParameterSet<S> m;
    BasicParameterSet<S> v;
    std::int64_t step = 0;

    static BasicAdamState fresh(const BasicParameterSet<S>& params) {
        return {params.zeros_like(), params.zeros_like(), 0};
    }
};

using AdamState = BasicAdamState<float>;

// One bias-corrected Adam step, in place:
//   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
//   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <class S>
void adam_update(BasicParameterSet<S>& params, const BasicParameterSet<S>& grads, BasicAdamState<S>& state,
                 double lr, const AdamConfig& config = {});

}  // namespace lungbench::nn
