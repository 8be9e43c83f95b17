#pragma once

#include <complex>
#include <span>
#include <vector>

#include "lungbench/common/matrix.hpp"

namespace lungbench::dsp {

// Magnitude STFT of a 15 s, 4 kHz clip: 938 frames x 129 bins.
struct Spectrogram {
    RowMatrixD magnitudes;
    std::vector<double> frame_times;  // k * 0.016 s
    std::vector<double> bin_freqs;    // b * 15.625 Hz
};

// Centered framing: the signal is reflection-padded by half a window on
// each side, then cut into 256-sample periodic-Hann frames every 64 samples.
// Returns all 256 complex bins per frame (938 x 256).
RowMatrix<std::complex<double>> stft_complex(std::span<const double> samples);

// Requires exactly 60000 samples.
Spectrogram stft(std::span<const double> samples);

std::vector<double> hann_window(int size);

}  // namespace lungbench::dsp
