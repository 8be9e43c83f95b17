#include "lungbench/nn/adam.hpp"

#include <cmath>

#include "lungbench/common/error.hpp"

namespace lungbench::nn {

template <class S>
void adam_update(BasicParameterSet<S>& params, const BasicParameterSet<S>& grads, BasicAdamState<S>& state,
                 double lr, const AdamConfig& config) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw Error("adam.shape", "optimizer state does not match parameters");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i].values;
        const auto& g = grads[i].values;
        auto& m = state.m[i].values;
        auto& v = state.v[i].values;
        if (g.size() != p.size()) throw Error("adam.shape", "gradient shape mismatch for " + params[i].name);
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double gj = static_cast<double>(g[j]);
            const double mj = config.beta1 * static_cast<double>(m[j]) + (1.0 - config.beta1) * gj;
            const double vj = config.beta2 * static_cast<double>(v[j]) + (1.0 - config.beta2) * gj * gj;
            m[j] = static_cast<S>(mj);
            v[j] = static_cast<S>(vj);
            const double step = lr * (mj / c1) / (std::sqrt(vj / c2) + config.epsilon);
            p[j] = static_cast<S>(static_cast<double>(p[j]) - step);
        }
    }
}

template void adam_update<float>(BasicParameterSet<float>&, const BasicParameterSet<float>&,
                                 BasicAdamState<float>&, double, const AdamConfig&);
template void adam_update<double>(BasicParameterSet<double>&, const BasicParameterSet<double>&,
                                  BasicAdamState<double>&, double, const AdamConfig&);

}  // namespace lungbench::nn
