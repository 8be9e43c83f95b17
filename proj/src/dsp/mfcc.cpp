#include "lungbench/dsp/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lungbench/common/constants.hpp"
#include "lungbench/dsp/features.hpp"

namespace lungbench::dsp {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

RowMatrixD mel_filterbank(int bands, double f_min, double f_max) {
    const double m_lo = hz_to_mel(f_min), m_hi = hz_to_mel(f_max);
    std::vector<double> edges(bands + 2);
    for (int i = 0; i < bands + 2; ++i) {
        edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * i / (bands + 1));
    }
    RowMatrixD fb = RowMatrixD::Zero(bands, kWindowSize);
    for (int m = 0; m < bands; ++m) {
        const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
        for (int b = 0; b < kWindowSize; ++b) {
            const double f = b * kBinHz;
            const double rise = (f - lo) / (center - lo);
            const double fall = (hi - f) / (hi - center);
            fb(m, b) = std::max(0.0, std::min(rise, fall));
        }
    }
    return fb;
}

RowMatrixD dct2(const RowMatrixD& rows, int keep) {
    const int m = static_cast<int>(rows.cols());
    RowMatrixD basis(m, keep);
    for (int k = 0; k < keep; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / m);
        for (int i = 0; i < m; ++i) {
            basis(i, k) = scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * m));
        }
    }
    return rows * basis;
}

RowMatrixD delta(const RowMatrixD& c, int half_width) {
    const Eigen::Index n = c.rows();
    double denom = 0.0;
    for (int k = 1; k <= half_width; ++k) denom += k * k;
    denom *= 2.0;
    RowMatrixD out = RowMatrixD::Zero(n, c.cols());
    for (Eigen::Index t = 0; t < n; ++t) {
        for (int k = 1; k <= half_width; ++k) {
            const Eigen::Index ahead = std::min<Eigen::Index>(t + k, n - 1);
            const Eigen::Index behind = std::max<Eigen::Index>(t - k, 0);
            out.row(t) += k * (c.row(ahead) - c.row(behind));
        }
    }
    return out / denom;
}

RowMatrixD mfcc_block(std::span<const double> samples) {
    static const RowMatrixD filterbank = mel_filterbank();
    const RowMatrixD power = stft_complex(samples).cwiseAbs2();
    const RowMatrixD mel = (power * filterbank.transpose()).unaryExpr(&floored_log);
    const RowMatrixD statics = dct2(mel, kCepstra);
    const RowMatrixD d1 = delta(statics);
    const RowMatrixD d2 = delta(d1);
    RowMatrixD out(statics.rows(), 3 * kCepstra);
    out << statics, d1, d2;
    return out;
}

}  // namespace lungbench::dsp
