#pragma once

#include <cstddef>

namespace lungbench {

inline constexpr int kSampleRate = 4000;
inline constexpr double kClipSeconds = 15.0;
inline constexpr std::size_t kClipSamples = 60000;

inline constexpr int kWindowSize = 256;
inline constexpr int kHopSize = 64;
inline constexpr int kFrequencyBins = kWindowSize / 2 + 1;                     // 129
inline constexpr int kFrames = 1 + static_cast<int>(kClipSamples) / kHopSize;  // 938
inline constexpr int kCoarseFrames = kFrames / 2;                              // 469

inline constexpr double kHopSeconds = static_cast<double>(kHopSize) / kSampleRate;  // 0.016
inline constexpr double kBinHz = static_cast<double>(kSampleRate) / kWindowSize;    // 15.625

inline constexpr int kFeatureColumns = 193;

// Frame k of a centered STFT is centered at sample k*hop.
inline constexpr double frame_center_seconds(int frame, int hop_samples = kHopSize) {
    return static_cast<double>(frame) * hop_samples / kSampleRate;
}

}  // namespace lungbench
