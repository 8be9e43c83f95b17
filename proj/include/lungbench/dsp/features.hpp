#pragma once

#include <array>
#include <cstdint>

#include "lungbench/common/matrix.hpp"
#include "lungbench/dataset/audio.hpp"
#include "lungbench/dsp/spectrogram.hpp"

namespace lungbench::dsp {

// Bumped whenever any step of the feature pipeline changes; part of the
// feature-cache key.
inline constexpr std::uint32_t kFeatureVersion = 1;

inline constexpr double kLogFloor = 1e-10;

// log(x + kLogFloor). Always the scalar libm path, so equal inputs give
// equal outputs regardless of their position in a vectorized expression.
double floored_log(double x);

struct Band {
    double lo_hz;
    double hi_hz;
};
inline constexpr std::array<Band, 4> kEnergyBands = {{{0.0, 250.0}, {250.0, 500.0}, {500.0, 1000.0}, {0.0, 2000.0}}};

// Column layout of the feature matrix.
inline constexpr int kSpectrogramColumns = 129;
inline constexpr int kMfccOffset = 129;
inline constexpr int kBandOffset = 189;

// 938 x 193, every value in [0, 1].
struct FeatureMatrix {
    RowMatrixF values;
};

// Per frame, sum of squared magnitudes over bins with center in [lo, hi).
RowMatrixD band_energy(const Spectrogram& spec);

// Per-column min-max scaling in place; constant columns become zero.
void minmax_normalize(RowMatrixD& m);

struct FeatureResult {
    FeatureMatrix features;
    Spectrogram spectrogram;  // of the high-passed signal
};

// High-pass -> {log-magnitude spectrogram, MFCC block, band energies} ->
// concatenation -> per-recording min-max normalization.
FeatureResult extract_features(const dataset::AudioClip& clip);
FeatureMatrix build_feature_matrix(const dataset::AudioClip& clip);

}  // namespace lungbench::dsp
