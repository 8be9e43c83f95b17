#pragma once

// Central finite-difference checks shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "lungbench/common/random.hpp"
#include "lungbench/nn/layers.hpp"
#include "lungbench/nn/network.hpp"

namespace gradcheck {

using lungbench::RowMatrix;
using lungbench::Rng;
using lungbench::nn::BasicParameterSet;
using lungbench::nn::Layer;
using lungbench::nn::LayerState;

// Fourth-order central stencil
//   (8 (f(x+h) - f(x-h)) - (f(x+2h) - f(x-2h))) / 12h
// at h = 1e-3: truncation error O(h^4) and rounding error near eps/h, so
// gradients down to ~1e-9 are resolved to better than 1e-4 relative.
inline constexpr double kStep = 1e-3;
inline constexpr double kTolerance = 1e-4;
template <class Objective>
double central_difference(double& slot, Objective&& objective) {
    const double saved = slot;
    auto at = [&](double offset) {
        slot = saved + offset;
        return objective();
    };
    const double d1 = at(kStep) - at(-kStep);
    const double d2 = at(2.0 * kStep) - at(-2.0 * kStep);
    slot = saved;
    return (8.0 * d1 - d2) / (12.0 * kStep);
}

// Below this magnitude both sides count as zero (relative error is then
// dominated by rounding noise of the difference quotient).
inline constexpr double kFloor = 1e-7;

struct Report {
    double max_relative = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;  // perturbation crossed a ReLU/pool kink

    bool ok() const { return max_relative < kTolerance && checked > 0; }
    void add(double analytic, double numeric) {
        const double denom = std::max({std::abs(analytic), std::abs(numeric), kFloor});
        max_relative = std::max(max_relative, std::abs(analytic - numeric) / denom);
        ++checked;
    }
};

inline RowMatrix<double> random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    RowMatrix<double> m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
    return m;
}

inline void randomize(BasicParameterSet<double>& p, Rng& rng, double scale) {
    for (auto& t : p.tensors) {
        for (auto& v : t.values) v = rng.uniform(-scale, scale);
    }
}

// L = sum(R .* layer(x)) for a fixed random R, checked against every
// parameter and every input coordinate.
inline Report check_layer(const Layer<double>& layer, BasicParameterSet<double> params, RowMatrix<double> x, Rng& rng) {
    std::unique_ptr<LayerState> state;
    const RowMatrix<double> y = layer.forward(params, x, &state);
    const RowMatrix<double> r = random_matrix(rng, y.rows(), y.cols());
    std::vector<std::int64_t> base_pattern;
    state->append_pattern(base_pattern);

    auto grads = params.zeros_like();
    const RowMatrix<double> dx = layer.backward(params, *state, r, grads);

    auto objective = [&](bool& same_pattern) {
        std::unique_ptr<LayerState> s;
        const RowMatrix<double> out = layer.forward(params, x, &s);
        std::vector<std::int64_t> pattern;
        s->append_pattern(pattern);
        same_pattern = same_pattern && pattern == base_pattern;
        return (out.array() * r.array()).sum();
    };
    auto numeric = [&](double& slot, bool& same) {
        return central_difference(slot, [&] { return objective(same); });
    };

    Report report;
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (std::size_t j = 0; j < params[i].values.size(); ++j) {
            bool same = true;
            const double n = numeric(params[i].values[j], same);
            if (!same) {
                ++report.skipped;
                continue;
            }
            report.add(grads[i].values[j], n);
        }
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        bool same = true;
        const double n = numeric(x.data()[i], same);
        if (!same) {
            ++report.skipped;
            continue;
        }
        report.add(dx.data()[i], n);
    }
    return report;
}

// Full model: BCE(sigmoid(logits)) gradient against every parameter.
inline Report check_network(const lungbench::nn::Network<double>& net, BasicParameterSet<double> params,
                            const RowMatrix<double>& x, const std::vector<std::uint8_t>& targets) {
    auto grads = params.zeros_like();
    net.loss_and_gradients(params, x, targets, grads);
    std::vector<std::int64_t> base_pattern;
    net.logits(params, x, &base_pattern);

    auto objective = [&](bool& same) {
        std::vector<std::int64_t> pattern;
        net.logits(params, x, &pattern);
        same = same && pattern == base_pattern;
        return net.loss(params, x, targets);
    };
    Report report;
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (std::size_t j = 0; j < params[i].values.size(); ++j) {
            bool same = true;
            const double n = central_difference(params[i].values[j], [&] { return objective(same); });
            if (!same) {
                ++report.skipped;
                continue;
            }
            report.add(grads[i].values[j], n);
        }
    }
    return report;
}

}  // namespace gradcheck
