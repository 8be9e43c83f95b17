#include "lungbench/dataset/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lungbench/common/error.hpp"

namespace lungbench::dataset {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) |
           (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t off, const char* tag) {
    return std::memcmp(b.data() + off, tag, 4) == 0;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

std::int16_t to_pcm16(double x) {
    const double scaled = std::nearbyint(x * 32768.0);
    return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

}  // namespace

const char* to_string(DeviceTag tag) {
    return tag == DeviceTag::trunc ? "trunc" : "steth";
}

DeviceTag device_from_name(std::string_view name) {
    const auto slash = name.find_last_of("/\\");
    if (slash != std::string_view::npos) name.remove_prefix(slash + 1);
    return name.starts_with("trunc_") ? DeviceTag::trunc : DeviceTag::steth;
}

AudioClip parse_wav(std::span<const std::uint8_t> bytes, std::string source_id) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
        throw Error("wav.header", "malformed header: not a RIFF/WAVE container");
    }

    bool have_fmt = false;
    std::uint16_t channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::span<const std::uint8_t> data;
    bool have_data = false;

    std::size_t off = 12;
    while (off + 8 <= bytes.size()) {
        const std::uint32_t size = read_u32(bytes, off + 4);
        const std::size_t body = off + 8;
        if (size > bytes.size() - body) {
            // Some writers leave a stale data size; accept what is present.
            if (!tag_is(bytes, off, "data")) {
                throw Error("wav.header", "malformed header: chunk exceeds file size");
            }
        }
        const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
        if (tag_is(bytes, off, "fmt ")) {
            if (avail < 16) throw Error("wav.header", "malformed header: short fmt chunk");
            std::uint16_t format = read_u16(bytes, body);
            channels = read_u16(bytes, body + 2);
            rate = read_u32(bytes, body + 4);
            bits = read_u16(bytes, body + 14);
            if (format == kFormatExtensible && avail >= 26) format = read_u16(bytes, body + 24);
            if (format != kFormatPcm) {
                throw Error("wav.format", "unsupported sample format (only integer PCM)");
            }
            have_fmt = true;
        } else if (tag_is(bytes, off, "data")) {
            data = bytes.subspan(body, avail);
            have_data = true;
        }
        off = body + avail + (avail & 1u);
    }

    if (!have_fmt) throw Error("wav.header", "malformed header: missing fmt chunk");
    if (!have_data) throw Error("wav.header", "malformed header: missing data chunk");
    if (channels != 1) throw Error("wav.channels", "unsupported channel count: " + std::to_string(channels));
    if (bits != 16) throw Error("wav.bits", "unsupported bit depth: " + std::to_string(bits));
    if (rate != static_cast<std::uint32_t>(kSampleRate)) {
        throw Error("wav.rate", "sample rate mismatch: expected 4000 Hz, got " + std::to_string(rate));
    }

    AudioClip clip;
    clip.sample_rate = kSampleRate;
    clip.device = device_from_name(source_id);
    clip.source_id = std::move(source_id);
    const std::size_t n = data.size() / 2;
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto raw = static_cast<std::int16_t>(read_u16(data, 2 * i));
        clip.samples[i] = static_cast<double>(raw) / 32768.0;
    }
    return clip;
}

AudioClip read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io.open", "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_wav(bytes, path.filename().string());
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip) {
    const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, kFormatPcm);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (double x : clip.samples) put_u16(out, static_cast<std::uint16_t>(to_pcm16(x)));
    return out;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
    const auto bytes = encode_wav(clip);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io.open", "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("io.write", "write failed: " + path.string());
}

AudioClip truncate_clip(const AudioClip& clip, double seconds) {
    const auto keep = static_cast<std::size_t>(std::llround(seconds * clip.sample_rate));
    if (clip.samples.size() < keep) {
        throw Error("clip.short", "clip too short: " + std::to_string(clip.samples.size()) +
                                      " samples, need " + std::to_string(keep));
    }
    AudioClip out = clip;
    out.samples.resize(keep);
    return out;
}

void quantize_pcm16(std::vector<double>& samples) {
    for (double& x : samples) x = static_cast<double>(to_pcm16(x)) / 32768.0;
}

}  // namespace lungbench::dataset
