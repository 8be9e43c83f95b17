#include "lungbench/dsp/spectrogram.hpp"

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "lungbench/common/constants.hpp"
#include "lungbench/common/error.hpp"

namespace lungbench::dsp {

std::vector<double> hann_window(int size) {
    std::vector<double> w(size);
    for (int i = 0; i < size; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / size);
    }
    return w;
}

RowMatrix<std::complex<double>> stft_complex(std::span<const double> samples) {
    if (samples.size() != kClipSamples) {
        throw Error("dsp.shape", "STFT expects 60000 samples, got " + std::to_string(samples.size()));
    }
    const int n = static_cast<int>(samples.size());
    const int pad = kWindowSize / 2;
    std::vector<double> padded(n + 2 * pad);
    for (int i = 0; i < pad; ++i) {
        padded[i] = samples[pad - i];
        padded[n + pad + i] = samples[n - 2 - i];
    }
    std::copy(samples.begin(), samples.end(), padded.begin() + pad);

    static const std::vector<double> window = hann_window(kWindowSize);
    Eigen::FFT<double> fft;
    std::vector<double> frame(kWindowSize);
    std::vector<std::complex<double>> spectrum;
    RowMatrix<std::complex<double>> out(kFrames, kWindowSize);
    for (int k = 0; k < kFrames; ++k) {
        const double* src = padded.data() + static_cast<std::ptrdiff_t>(k) * kHopSize;
        for (int i = 0; i < kWindowSize; ++i) frame[i] = src[i] * window[i];
        fft.fwd(spectrum, frame);
        for (int b = 0; b < kWindowSize; ++b) out(k, b) = spectrum[b];
    }
    return out;
}

Spectrogram stft(std::span<const double> samples) {
    const auto complex = stft_complex(samples);
    Spectrogram spec;
    spec.magnitudes = complex.leftCols(kFrequencyBins).cwiseAbs();
    spec.frame_times.resize(kFrames);
    for (int k = 0; k < kFrames; ++k) spec.frame_times[k] = frame_center_seconds(k);
    spec.bin_freqs.resize(kFrequencyBins);
    for (int b = 0; b < kFrequencyBins; ++b) spec.bin_freqs[b] = b * kBinHz;
    return spec;
}

}  // namespace lungbench::dsp
