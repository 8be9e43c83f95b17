#pragma once

#include <span>

#include "lungbench/common/matrix.hpp"
#include "lungbench/dsp/spectrogram.hpp"

namespace lungbench::dsp {

inline constexpr int kMelBands = 40;
inline constexpr int kCepstra = 20;
inline constexpr int kDeltaHalfWidth = 4;  // frame width 9

// Triangular filters equally spaced on the 2595*log10(1 + f/700) scale
// between 0 and 4000 Hz, one row per band over the full 256-bin periodic
// spectrum (bin b at b * 15.625 Hz). Bins above Nyquist mirror bins below.
RowMatrixD mel_filterbank(int bands = kMelBands, double f_min = 0.0, double f_max = 4000.0);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Regression delta with replicate padding: sum_n n(c[t+n] - c[t-n]) / (2 sum_n n^2).
RowMatrixD delta(const RowMatrixD& coefficients, int half_width = kDeltaHalfWidth);

// Orthonormal DCT-II of each row, first `keep` coefficients.
RowMatrixD dct2(const RowMatrixD& rows, int keep);

// 938 x 60: 20 static MFCCs, 20 deltas, 20 accelerations.
RowMatrixD mfcc_block(std::span<const double> samples);

}  // namespace lungbench::dsp
