#include "lungbench/nn/layers.hpp"

#include <cmath>

#include "lungbench/common/error.hpp"

namespace lungbench::nn {

namespace {

template <class S>
using Map = Eigen::Map<RowMatrix<S>>;
template <class S>
using ConstMap = Eigen::Map<const RowMatrix<S>>;
template <class S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

template <class S>
ConstMap<S> view(const BasicParameterSet<S>& p, std::size_t index, Eigen::Index rows, Eigen::Index cols) {
    return ConstMap<S>(p[index].values.data(), rows, cols);
}

template <class S>
Map<S> view(BasicParameterSet<S>& p, std::size_t index, Eigen::Index rows, Eigen::Index cols) {
    return Map<S>(p[index].values.data(), rows, cols);
}

template <class S>
S sigmoid(S x) {
    return S(1) / (S(1) + std::exp(-x));
}

template <class S>
struct InputState : LayerState {
    RowMatrix<S> x;
};

template <class S>
struct ReluState : LayerState {
    RowMatrix<S> mask;
    void append_pattern(std::vector<std::int64_t>& out) const override {
        for (Eigen::Index i = 0; i < mask.size(); ++i) out.push_back(mask.data()[i] > S(0) ? 1 : 0);
    }
};

struct PoolState : LayerState {
    std::vector<std::int64_t> argmax;
    Eigen::Index rows = 0, cols = 0;
    void append_pattern(std::vector<std::int64_t>& out) const override {
        out.insert(out.end(), argmax.begin(), argmax.end());
    }
};

template <class S>
struct LstmState : LayerState {
    RowMatrix<S> x, gates, c, tanh_c, h;  // gates hold activated i, f, g, o
};

template <class S>
struct GruState : LayerState {
    RowMatrix<S> x, z, r, n, hp_n, h;
};

template <class S>
struct BiState : LayerState {
    std::unique_ptr<LayerState> fw, bw;
};

}  // namespace

template <class S>
BasicParameterSet<S> initialize(const ParameterLayout& layout, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x1417));
    BasicParameterSet<S> out;
    for (const auto& spec : layout.specs) {
        std::size_t n = 1;
        for (int d : spec.shape) n *= static_cast<std::size_t>(d);
        Tensor<S> t{spec.name, spec.shape, std::vector<S>(n, S(0))};
        if (spec.init == InitKind::glorot_uniform) {
            const double limit = std::sqrt(6.0 / static_cast<double>(spec.fan_in + spec.fan_out));
            for (auto& v : t.values) v = static_cast<S>(rng.uniform(-limit, limit));
        } else if (spec.init == InitKind::lstm_bias) {
            const std::size_t h = n / 4;
            for (std::size_t i = h; i < 2 * h; ++i) t.values[i] = S(1);
        }
        out.tensors.push_back(std::move(t));
    }
    return out;
}

// ---- Dense -------------------------------------------------------------

template <class S>
Dense<S>::Dense(ParameterLayout& layout, const std::string& name, int in, int out) : in_(in), out_(out) {
    kernel_ = layout.add({name + "/kernel", {in, out}, InitKind::glorot_uniform, in, out});
    bias_ = layout.add({name + "/bias", {out}, InitKind::zeros});
}

template <class S>
RowMatrix<S> Dense<S>::forward(const BasicParameterSet<S>& p, const RowMatrix<S>& x,
                               std::unique_ptr<LayerState>* state) const {
    const auto W = view(p, kernel_, in_, out_);
    const auto b = view(p, bias_, 1, out_);
    RowMatrix<S> y = x * W;
    y.rowwise() += b.row(0);
    if (state) {
        auto s = std::make_unique<InputState<S>>();
        s->x = x;
        *state = std::move(s);
    }
    return y;
}

template <class S>
RowMatrix<S> Dense<S>::backward(const BasicParameterSet<S>& p, const LayerState& state, const RowMatrix<S>& dy,
                                BasicParameterSet<S>& g) const {
    const auto& x = static_cast<const InputState<S>&>(state).x;
    view(g, kernel_, in_, out_).noalias() += x.transpose() * dy;
    view(g, bias_, 1, out_) += dy.colwise().sum();
    return dy * view(p, kernel_, in_, out_).transpose();
}

// ---- ReLU --------------------------------------------------------------

template <class S>
RowMatrix<S> Relu<S>::forward(const BasicParameterSet<S>&, const RowMatrix<S>& x,
                              std::unique_ptr<LayerState>* state) const {
    if (state) {
        auto s = std::make_unique<ReluState<S>>();
        s->mask = (x.array() > S(0)).template cast<S>();
        *state = std::move(s);
    }
    return x.cwiseMax(S(0));
}

template <class S>
RowMatrix<S> Relu<S>::backward(const BasicParameterSet<S>&, const LayerState& state, const RowMatrix<S>& dy,
                               BasicParameterSet<S>&) const {
    return dy.cwiseProduct(static_cast<const ReluState<S>&>(state).mask);
}

// ---- Conv2D ------------------------------------------------------------

namespace {

// Patch matrix of time row t: (freq x 9*cin), columns ordered (kt, kf, ci).
template <class S>
void im2col_row(const RowMatrix<S>& x, Eigen::Index t, int freq, int cin, RowMatrix<S>& patch) {
    const Eigen::Index steps = x.rows();
    patch.setZero(freq, 9 * cin);
    for (int kt = 0; kt < 3; ++kt) {
        const Eigen::Index tt = t + kt - 1;
        if (tt < 0 || tt >= steps) continue;
        const S* row = x.row(tt).data();
        for (int f = 0; f < freq; ++f) {
            for (int kf = 0; kf < 3; ++kf) {
                const int ff = f + kf - 1;
                if (ff < 0 || ff >= freq) continue;
                S* dst = patch.row(f).data() + (kt * 3 + kf) * cin;
                const S* src = row + static_cast<std::ptrdiff_t>(ff) * cin;
                for (int c = 0; c < cin; ++c) dst[c] = src[c];
            }
        }
    }
}

}  // namespace

template <class S>
Conv2D<S>::Conv2D(ParameterLayout& layout, const std::string& name, int freq, int in_channels, int out_channels)
    : freq_(freq), cin_(in_channels), cout_(out_channels) {
    kernel_ = layout.add({name + "/kernel", {3, 3, cin_, cout_}, InitKind::glorot_uniform, 9 * cin_, 9 * cout_});
    bias_ = layout.add({name + "/bias", {cout_}, InitKind::zeros});
}

template <class S>
RowMatrix<S> Conv2D<S>::forward(const BasicParameterSet<S>& p, const RowMatrix<S>& x,
                                std::unique_ptr<LayerState>* state) const {
    if (x.cols() != static_cast<Eigen::Index>(freq_) * cin_) throw Error("nn.shape", "conv input width mismatch");
    const auto W = view(p, kernel_, 9 * cin_, cout_);
    const auto b = view(p, bias_, 1, cout_);
    RowMatrix<S> y(x.rows(), static_cast<Eigen::Index>(freq_) * cout_);
    RowMatrix<S> patch;
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        im2col_row(x, t, freq_, cin_, patch);
        Map<S> out(y.row(t).data(), freq_, cout_);
        out.noalias() = patch * W;
        out.rowwise() += b.row(0);
    }
    if (state) {
        auto s = std::make_unique<InputState<S>>();
        s->x = x;
        *state = std::move(s);
    }
    return y;
}

template <class S>
RowMatrix<S> Conv2D<S>::backward(const BasicParameterSet<S>& p, const LayerState& state, const RowMatrix<S>& dy,
                                 BasicParameterSet<S>& g) const {
    const auto& x = static_cast<const InputState<S>&>(state).x;
    const auto W = view(p, kernel_, 9 * cin_, cout_);
    auto dW = view(g, kernel_, 9 * cin_, cout_);
    auto db = view(g, bias_, 1, cout_);
    RowMatrix<S> dx = RowMatrix<S>::Zero(x.rows(), x.cols());
    RowMatrix<S> patch, dpatch;
    const Eigen::Index steps = x.rows();
    for (Eigen::Index t = 0; t < steps; ++t) {
        im2col_row(x, t, freq_, cin_, patch);
        const ConstMap<S> dout(dy.row(t).data(), freq_, cout_);
        dW.noalias() += patch.transpose() * dout;
        db += dout.colwise().sum();
        dpatch.noalias() = dout * W.transpose();
        for (int kt = 0; kt < 3; ++kt) {
            const Eigen::Index tt = t + kt - 1;
            if (tt < 0 || tt >= steps) continue;
            S* row = dx.row(tt).data();
            for (int f = 0; f < freq_; ++f) {
                for (int kf = 0; kf < 3; ++kf) {
                    const int ff = f + kf - 1;
                    if (ff < 0 || ff >= freq_) continue;
                    const S* src = dpatch.row(f).data() + (kt * 3 + kf) * cin_;
                    S* dst = row + static_cast<std::ptrdiff_t>(ff) * cin_;
                    for (int c = 0; c < cin_; ++c) dst[c] += src[c];
                }
            }
        }
    }
    return dx;
}

// ---- MaxPool2x2 --------------------------------------------------------

template <class S>
RowMatrix<S> MaxPool2x2<S>::forward(const BasicParameterSet<S>&, const RowMatrix<S>& x,
                                    std::unique_ptr<LayerState>* state) const {
    if (x.cols() != static_cast<Eigen::Index>(freq_) * channels_) throw Error("nn.shape", "pool input width mismatch");
    const Eigen::Index steps = x.rows();
    const Eigen::Index out_steps = (steps + 1) / 2;
    const int out_freq = (freq_ + 1) / 2;
    RowMatrix<S> y(out_steps, static_cast<Eigen::Index>(out_freq) * channels_);
    std::vector<std::int64_t> argmax(static_cast<std::size_t>(y.size()));
    for (Eigen::Index t2 = 0; t2 < out_steps; ++t2) {
        for (int f2 = 0; f2 < out_freq; ++f2) {
            for (int c = 0; c < channels_; ++c) {
                S best = S(0);
                std::int64_t best_at = -1;
                for (Eigen::Index t = 2 * t2; t < std::min(2 * t2 + 2, steps); ++t) {
                    for (int f = 2 * f2; f < std::min(2 * f2 + 2, freq_); ++f) {
                        const Eigen::Index col = static_cast<Eigen::Index>(f) * channels_ + c;
                        if (best_at < 0 || x(t, col) > best) {
                            best = x(t, col);
                            best_at = t * x.cols() + col;
                        }
                    }
                }
                const Eigen::Index out_col = static_cast<Eigen::Index>(f2) * channels_ + c;
                y(t2, out_col) = best;
                argmax[static_cast<std::size_t>(t2 * y.cols() + out_col)] = best_at;
            }
        }
    }
    if (state) {
        auto s = std::make_unique<PoolState>();
        s->argmax = std::move(argmax);
        s->rows = x.rows();
        s->cols = x.cols();
        *state = std::move(s);
    }
    return y;
}

template <class S>
RowMatrix<S> MaxPool2x2<S>::backward(const BasicParameterSet<S>&, const LayerState& state, const RowMatrix<S>& dy,
                                     BasicParameterSet<S>&) const {
    const auto& s = static_cast<const PoolState&>(state);
    RowMatrix<S> dx = RowMatrix<S>::Zero(s.rows, s.cols);
    for (Eigen::Index i = 0; i < dy.size(); ++i) dx.data()[s.argmax[static_cast<std::size_t>(i)]] += dy.data()[i];
    return dx;
}

// ---- Recurrent ---------------------------------------------------------

template <class S>
Recurrent<S>::Recurrent(ParameterLayout& layout, const std::string& name, CellType cell, int in, int hidden,
                        bool reversed)
    : cell_(cell), in_(in), hidden_(hidden), reversed_(reversed) {
    const int gates = cell == CellType::lstm ? 4 : 3;
    kernel_ = layout.add({name + "kernel", {in, gates * hidden}, InitKind::glorot_uniform, in, gates * hidden});
    recurrent_ = layout.add(
        {name + "recurrent_kernel", {hidden, gates * hidden}, InitKind::glorot_uniform, hidden, gates * hidden});
    if (cell == CellType::lstm) {
        bias_ = layout.add({name + "bias", {4 * hidden}, InitKind::lstm_bias});
    } else {
        bias_ = layout.add({name + "bias", {2, 3 * hidden}, InitKind::zeros});
    }
}

template <class S>
RowMatrix<S> Recurrent<S>::forward(const BasicParameterSet<S>& p, const RowMatrix<S>& x,
                                   std::unique_ptr<LayerState>* state) const {
    if (x.cols() != in_) throw Error("nn.shape", "recurrent input width mismatch");
    return cell_ == CellType::lstm ? forward_lstm(p, x, state) : forward_gru(p, x, state);
}

template <class S>
RowMatrix<S> Recurrent<S>::backward(const BasicParameterSet<S>& p, const LayerState& state, const RowMatrix<S>& dy,
                                    BasicParameterSet<S>& g) const {
    return cell_ == CellType::lstm ? backward_lstm(p, state, dy, g) : backward_gru(p, state, dy, g);
}

template <class S>
RowMatrix<S> Recurrent<S>::forward_lstm(const BasicParameterSet<S>& p, const RowMatrix<S>& x,
                                        std::unique_ptr<LayerState>* state) const {
    const int h = hidden_;
    const Eigen::Index steps = x.rows();
    const auto W = view(p, kernel_, in_, 4 * h);
    const auto U = view(p, recurrent_, h, 4 * h);
    const auto b = view(p, bias_, 1, 4 * h);

    RowMatrix<S> pre = x * W;
    pre.rowwise() += b.row(0);
    RowMatrix<S> gates(steps, 4 * h), c(steps, h), tanh_c(steps, h), out(steps, h);
    RowVec<S> h_prev = RowVec<S>::Zero(h), c_prev = RowVec<S>::Zero(h), z(4 * h);
    for (Eigen::Index s = 0; s < steps; ++s) {
        const Eigen::Index t = reversed_ ? steps - 1 - s : s;
        z.noalias() = pre.row(t) + h_prev * U;
        for (int j = 0; j < h; ++j) {
            const S i = sigmoid(z[j]);
            const S f = sigmoid(z[h + j]);
            const S gg = std::tanh(z[2 * h + j]);
            const S o = sigmoid(z[3 * h + j]);
            const S cc = f * c_prev[j] + i * gg;
            const S tc = std::tanh(cc);
            gates(t, j) = i;
            gates(t, h + j) = f;
            gates(t, 2 * h + j) = gg;
            gates(t, 3 * h + j) = o;
            c(t, j) = cc;
            tanh_c(t, j) = tc;
            out(t, j) = o * tc;
        }
        h_prev = out.row(t);
        c_prev = c.row(t);
    }
    if (state) {
        auto st = std::make_unique<LstmState<S>>();
        st->x = x;
        st->gates = std::move(gates);
        st->c = std::move(c);
        st->tanh_c = std::move(tanh_c);
        st->h = out;
        *state = std::move(st);
    }
    return out;
}

template <class S>
RowMatrix<S> Recurrent<S>::backward_lstm(const BasicParameterSet<S>& p, const LayerState& state,
                                         const RowMatrix<S>& dy, BasicParameterSet<S>& g) const {
    const auto& st = static_cast<const LstmState<S>&>(state);
    const int h = hidden_;
    const Eigen::Index steps = st.x.rows();
    const auto W = view(p, kernel_, in_, 4 * h);
    const auto U = view(p, recurrent_, h, 4 * h);

    RowMatrix<S> dpre(steps, 4 * h);
    RowMatrix<S> h_prev_all = RowMatrix<S>::Zero(steps, h);
    RowVec<S> dh_next = RowVec<S>::Zero(h), dc_next = RowVec<S>::Zero(h);
    for (Eigen::Index s = steps - 1; s >= 0; --s) {
        const Eigen::Index t = reversed_ ? steps - 1 - s : s;
        const bool first = s == 0;
        const Eigen::Index tp = reversed_ ? t + 1 : t - 1;
        for (int j = 0; j < h; ++j) {
            const S i = st.gates(t, j), f = st.gates(t, h + j), gg = st.gates(t, 2 * h + j), o = st.gates(t, 3 * h + j);
            const S tc = st.tanh_c(t, j);
            const S c_prev = first ? S(0) : st.c(tp, j);
            const S dh = dy(t, j) + dh_next[j];
            const S dc = dh * o * (S(1) - tc * tc) + dc_next[j];
            dpre(t, j) = dc * gg * i * (S(1) - i);
            dpre(t, h + j) = dc * c_prev * f * (S(1) - f);
            dpre(t, 2 * h + j) = dc * i * (S(1) - gg * gg);
            dpre(t, 3 * h + j) = dh * tc * o * (S(1) - o);
            dc_next[j] = dc * f;
        }
        if (!first) h_prev_all.row(t) = st.h.row(tp);
        dh_next.noalias() = dpre.row(t) * U.transpose();
    }
    view(g, recurrent_, h, 4 * h).noalias() += h_prev_all.transpose() * dpre;
    view(g, kernel_, in_, 4 * h).noalias() += st.x.transpose() * dpre;
    view(g, bias_, 1, 4 * h) += dpre.colwise().sum();
    return dpre * W.transpose();
}

template <class S>
RowMatrix<S> Recurrent<S>::forward_gru(const BasicParameterSet<S>& p, const RowMatrix<S>& x,
                                       std::unique_ptr<LayerState>* state) const {
    const int h = hidden_;
    const Eigen::Index steps = x.rows();
    const auto W = view(p, kernel_, in_, 3 * h);
    const auto U = view(p, recurrent_, h, 3 * h);
    const auto b = view(p, bias_, 2, 3 * h);

    RowMatrix<S> pre = x * W;
    pre.rowwise() += b.row(0);
    RowMatrix<S> zs(steps, h), rs(steps, h), ns(steps, h), hp_n(steps, h), out(steps, h);
    RowVec<S> h_prev = RowVec<S>::Zero(h), hp(3 * h);
    for (Eigen::Index s = 0; s < steps; ++s) {
        const Eigen::Index t = reversed_ ? steps - 1 - s : s;
        hp.noalias() = h_prev * U;
        hp += b.row(1);
        for (int j = 0; j < h; ++j) {
            const S z = sigmoid(pre(t, j) + hp[j]);
            const S r = sigmoid(pre(t, h + j) + hp[h + j]);
            const S n = std::tanh(pre(t, 2 * h + j) + r * hp[2 * h + j]);
            zs(t, j) = z;
            rs(t, j) = r;
            ns(t, j) = n;
            hp_n(t, j) = hp[2 * h + j];
            out(t, j) = z * h_prev[j] + (S(1) - z) * n;
        }
        h_prev = out.row(t);
    }
    if (state) {
        auto st = std::make_unique<GruState<S>>();
        st->x = x;
        st->z = std::move(zs);
        st->r = std::move(rs);
        st->n = std::move(ns);
        st->hp_n = std::move(hp_n);
        st->h = out;
        *state = std::move(st);
    }
    return out;
}

template <class S>
RowMatrix<S> Recurrent<S>::backward_gru(const BasicParameterSet<S>& p, const LayerState& state,
                                        const RowMatrix<S>& dy, BasicParameterSet<S>& g) const {
    const auto& st = static_cast<const GruState<S>&>(state);
    const int h = hidden_;
    const Eigen::Index steps = st.x.rows();
    const auto W = view(p, kernel_, in_, 3 * h);
    const auto U = view(p, recurrent_, h, 3 * h);

    RowMatrix<S> dpre(steps, 3 * h), dhp(steps, 3 * h);
    RowMatrix<S> h_prev_all = RowMatrix<S>::Zero(steps, h);
    RowVec<S> dh_next = RowVec<S>::Zero(h), dh_direct(h);
    for (Eigen::Index s = steps - 1; s >= 0; --s) {
        const Eigen::Index t = reversed_ ? steps - 1 - s : s;
        const bool first = s == 0;
        const Eigen::Index tp = reversed_ ? t + 1 : t - 1;
        for (int j = 0; j < h; ++j) {
            const S z = st.z(t, j), r = st.r(t, j), n = st.n(t, j);
            const S hprev = first ? S(0) : st.h(tp, j);
            const S dh = dy(t, j) + dh_next[j];
            const S dz = dh * (hprev - n);
            const S dn_pre = dh * (S(1) - z) * (S(1) - n * n);
            const S dr_pre = dn_pre * st.hp_n(t, j) * r * (S(1) - r);
            const S dz_pre = dz * z * (S(1) - z);
            dpre(t, j) = dz_pre;
            dpre(t, h + j) = dr_pre;
            dpre(t, 2 * h + j) = dn_pre;
            dhp(t, j) = dz_pre;
            dhp(t, h + j) = dr_pre;
            dhp(t, 2 * h + j) = dn_pre * r;
            dh_direct[j] = dh * z;
        }
        if (!first) h_prev_all.row(t) = st.h.row(tp);
        dh_next.noalias() = dhp.row(t) * U.transpose();
        dh_next += dh_direct;
    }
    view(g, recurrent_, h, 3 * h).noalias() += h_prev_all.transpose() * dhp;
    view(g, kernel_, in_, 3 * h).noalias() += st.x.transpose() * dpre;
    auto db = view(g, bias_, 2, 3 * h);
    db.row(0) += dpre.colwise().sum();
    db.row(1) += dhp.colwise().sum();
    return dpre * W.transpose();
}

// ---- Bidirectional -----------------------------------------------------

template <class S>
Bidirectional<S>::Bidirectional(ParameterLayout& layout, const std::string& name, CellType cell, int in, int hidden)
    : hidden_(hidden),
      forward_dir_(layout, name + "/forward_", cell, in, hidden, false),
      backward_dir_(layout, name + "/backward_", cell, in, hidden, true) {}

template <class S>
RowMatrix<S> Bidirectional<S>::forward(const BasicParameterSet<S>& p, const RowMatrix<S>& x,
                                       std::unique_ptr<LayerState>* state) const {
    std::unique_ptr<LayerState> fw, bw;
    RowMatrix<S> y(x.rows(), 2 * hidden_);
    y.leftCols(hidden_) = forward_dir_.forward(p, x, state ? &fw : nullptr);
    y.rightCols(hidden_) = backward_dir_.forward(p, x, state ? &bw : nullptr);
    if (state) {
        auto s = std::make_unique<BiState<S>>();
        s->fw = std::move(fw);
        s->bw = std::move(bw);
        *state = std::move(s);
    }
    return y;
}

template <class S>
RowMatrix<S> Bidirectional<S>::backward(const BasicParameterSet<S>& p, const LayerState& state,
                                        const RowMatrix<S>& dy, BasicParameterSet<S>& g) const {
    const auto& s = static_cast<const BiState<S>&>(state);
    RowMatrix<S> dx = forward_dir_.backward(p, *s.fw, dy.leftCols(hidden_), g);
    dx += backward_dir_.backward(p, *s.bw, dy.rightCols(hidden_), g);
    return dx;
}

#define LUNGBENCH_INSTANTIATE(S)                                                          \
    template BasicParameterSet<S> initialize<S>(const ParameterLayout&, std::uint64_t); \
    template class Dense<S>;                                                              \
    template class Relu<S>;                                                               \
    template class Conv2D<S>;                                                             \
    template class MaxPool2x2<S>;                                                         \
    template class Recurrent<S>;                                                          \
    template class Bidirectional<S>;

LUNGBENCH_INSTANTIATE(float)
LUNGBENCH_INSTANTIATE(double)

#undef LUNGBENCH_INSTANTIATE

}  // namespace lungbench::nn
