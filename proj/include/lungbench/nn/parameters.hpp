#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lungbench::nn {

template <class S>
struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<S> values;

    std::size_t size() const { return values.size(); }
};

// Ordered set of named weight tensors. Gradients and optimizer moments use
// the same type with identical layout.
template <class S>
class BasicParameterSet {
public:
    std::vector<Tensor<S>> tensors;

    std::size_t total_count() const {
        std::size_t n = 0;
        for (const auto& t : tensors) n += t.size();
        return n;
    }

    Tensor<S>& operator[](std::size_t i) { return tensors[i]; }
    const Tensor<S>& operator[](std::size_t i) const { return tensors[i]; }
    std::size_t size() const { return tensors.size(); }

    const Tensor<S>* find(std::string_view name) const {
        for (const auto& t : tensors) {
            if (t.name == name) return &t;
        }
        return nullptr;
    }
    Tensor<S>* find(std::string_view name) {
        for (auto& t : tensors) {
            if (t.name == name) return &t;
        }
        return nullptr;
    }

    BasicParameterSet zeros_like() const {
        BasicParameterSet out;
        out.tensors.reserve(tensors.size());
        for (const auto& t : tensors) out.tensors.push_back({t.name, t.shape, std::vector<S>(t.size(), S(0))});
        return out;
    }

    void set_zero() {
        for (auto& t : tensors) std::fill(t.values.begin(), t.values.end(), S(0));
    }

    // this += scale * other; layouts must match.
    void add_scaled(const BasicParameterSet& other, S scale) {
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            auto& dst = tensors[i].values;
            const auto& src = other.tensors[i].values;
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += scale * src[j];
        }
    }

    template <class T>
    BasicParameterSet<T> cast() const {
        BasicParameterSet<T> out;
        out.tensors.reserve(tensors.size());
        for (const auto& t : tensors) {
            out.tensors.push_back({t.name, t.shape, std::vector<T>(t.values.begin(), t.values.end())});
        }
        return out;
    }

    bool operator==(const BasicParameterSet& other) const {
        if (tensors.size() != other.tensors.size()) return false;
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            if (tensors[i].name != other.tensors[i].name || tensors[i].shape != other.tensors[i].shape ||
                tensors[i].values != other.tensors[i].values) {
                return false;
            }
        }
        return true;
    }
};

using ParameterSet = BasicParameterSet<float>;

template <class S>
std::size_t count_parameters(const BasicParameterSet<S>& params) {
    return params.total_count();
}

// Element counts grouped by layer (tensor-name prefix before '/'), in
// layer order.
template <class S>
std::vector<std::pair<std::string, std::size_t>> parameter_breakdown(const BasicParameterSet<S>& params) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& t : params.tensors) {
        const std::string layer = t.name.substr(0, t.name.find('/'));
        if (out.empty() || out.back().first != layer) out.emplace_back(layer, 0);
        out.back().second += t.size();
    }
    return out;
}

}  // namespace lungbench::nn
