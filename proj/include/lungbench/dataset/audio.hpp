#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lungbench/common/constants.hpp"

namespace lungbench::dataset {

enum class DeviceTag { steth, trunc };

const char* to_string(DeviceTag tag);

// Mono 4 kHz recording. Samples are 16-bit PCM values divided by 32768.
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = kSampleRate;
    std::string source_id;
    DeviceTag device = DeviceTag::steth;

    double duration() const {
        return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
    }
};

// Decodes a RIFF/WAVE PCM 16-bit mono 4000 Hz container. Anything else is
// rejected; there is no resampling or downmixing.
AudioClip parse_wav(std::span<const std::uint8_t> bytes, std::string source_id = {});
AudioClip read_wav(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_wav(const AudioClip& clip);
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

// Keeps the first `seconds` of the clip.
AudioClip truncate_clip(const AudioClip& clip, double seconds = kClipSeconds);

// Rounds every sample to the nearest representable 16-bit PCM value.
void quantize_pcm16(std::vector<double>& samples);

// "steth_..." / "trunc_..." filename prefix; steth when neither matches.
DeviceTag device_from_name(std::string_view name);

}  // namespace lungbench::dataset
