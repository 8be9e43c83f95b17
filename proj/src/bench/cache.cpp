#include "lungbench/bench/cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <thread>

#include "lungbench/common/checksum.hpp"
#include "lungbench/common/constants.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/dataset/audio.hpp"
#include "lungbench/dsp/features.hpp"

namespace lungbench::bench {

static_assert(std::endian::native == std::endian::little, "cache files are little-endian");

namespace {

constexpr char kMagic[8] = {'L', 'B', 'F', 'E', 'A', 'T', '\0', '\0'};

template <class T>
void put(std::vector<std::uint8_t>& out, const T& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}
    template <class T>
    T get() {
        T v;
        take(&v, sizeof(T));
        return v;
    }
    void take(void* dst, std::size_t n) {
        if (n > bytes_.size() - pos_) throw Error("cache.corrupt", "truncated cache entry");
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }
    std::size_t pos() const { return pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::uint64_t clip_checksum(std::span<const double> samples) { return fnv1a64_of(samples); }

void write_cache_entry(const std::filesystem::path& path, const CachedFeatures& entry) {
    const auto& f = *entry.features;
    const auto& m = entry.spectrogram->magnitudes;
    std::vector<std::uint8_t> out;
    out.reserve(64 + f.size() * 4 + m.size() * 8);
    out.insert(out.end(), kMagic, kMagic + 8);
    put(out, dsp::kFeatureVersion);
    put(out, entry.clip_checksum);
    put(out, static_cast<std::uint32_t>(f.rows()));
    put(out, static_cast<std::uint32_t>(f.cols()));
    const auto* fp = reinterpret_cast<const std::uint8_t*>(f.data());
    out.insert(out.end(), fp, fp + f.size() * sizeof(float));
    put(out, static_cast<std::uint32_t>(m.rows()));
    put(out, static_cast<std::uint32_t>(m.cols()));
    const auto* mp = reinterpret_cast<const std::uint8_t*>(m.data());
    out.insert(out.end(), mp, mp + m.size() * sizeof(double));
    put(out, fnv1a64_of(std::span<const std::uint8_t>(out)));

    // Write-then-rename so a crash never leaves a half-written entry behind.
    auto tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw Error("cache.write", "cannot write " + tmp.string());
        o.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
        if (!o) throw Error("cache.write", "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

CachedFeatures read_cache_entry(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cache.corrupt", "cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 8 + 4 + 8 + 8) throw Error("cache.corrupt", "truncated cache entry");
    std::uint64_t trailer;
    std::memcpy(&trailer, bytes.data() + bytes.size() - 8, 8);
    if (fnv1a64_of(std::span<const std::uint8_t>(bytes.data(), bytes.size() - 8)) != trailer)
        throw Error("cache.corrupt", "checksum mismatch in " + path.string());

    Reader r(bytes);
    char magic[8];
    r.take(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw Error("cache.corrupt", "bad magic in " + path.string());
    if (r.get<std::uint32_t>() != dsp::kFeatureVersion) throw Error("cache.corrupt", "feature version mismatch");
    CachedFeatures entry;
    entry.clip_checksum = r.get<std::uint64_t>();

    const auto fr = r.get<std::uint32_t>(), fc = r.get<std::uint32_t>();
    if (fr != static_cast<std::uint32_t>(kFrames) || fc != static_cast<std::uint32_t>(kFeatureColumns))
        throw Error("cache.corrupt", "unexpected feature shape");
    auto features = std::make_shared<RowMatrixF>(fr, fc);
    r.take(features->data(), features->size() * sizeof(float));

    const auto mr = r.get<std::uint32_t>(), mc = r.get<std::uint32_t>();
    if (mr != static_cast<std::uint32_t>(kFrames) || mc != static_cast<std::uint32_t>(kFrequencyBins))
        throw Error("cache.corrupt", "unexpected spectrogram shape");
    auto spec = std::make_shared<dsp::Spectrogram>();
    spec->magnitudes.resize(mr, mc);
    r.take(spec->magnitudes.data(), spec->magnitudes.size() * sizeof(double));
    if (r.pos() != bytes.size() - 8) throw Error("cache.corrupt", "trailing bytes in " + path.string());
    for (int k = 0; k < kFrames; ++k) spec->frame_times.push_back(frame_center_seconds(k));
    for (int b = 0; b < kFrequencyBins; ++b) spec->bin_freqs.push_back(b * kBinHz);

    entry.features = std::move(features);
    entry.spectrogram = std::move(spec);
    return entry;
}

FeatureCache::FeatureCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path FeatureCache::entry_path(std::uint64_t checksum) const {
    return dir_ / (hex64(checksum) + "_v" + std::to_string(dsp::kFeatureVersion) + ".feat");
}

CachedFeatures FeatureCache::get(const std::filesystem::path& wav_path) {
    const auto clip = dataset::truncate_clip(dataset::read_wav(wav_path));
    const auto checksum = clip_checksum(clip.samples);
    const auto path = entry_path(checksum);

    if (std::filesystem::exists(path)) {
        try {
            auto entry = read_cache_entry(path);
            if (entry.clip_checksum != checksum) throw Error("cache.corrupt", "clip checksum mismatch");
            std::lock_guard lock(mutex_);
            ++hits_;
            return entry;
        } catch (const Error& e) {
            std::lock_guard lock(mutex_);
            warnings_.push_back("cache entry for " + wav_path.string() + " recomputed: " + e.what());
        }
    }

    auto result = dsp::extract_features(clip);
    CachedFeatures entry;
    entry.clip_checksum = checksum;
    entry.features = std::make_shared<const RowMatrixF>(std::move(result.features.values));
    entry.spectrogram = std::make_shared<const dsp::Spectrogram>(std::move(result.spectrogram));
    write_cache_entry(path, entry);
    std::lock_guard lock(mutex_);
    ++misses_;
    return entry;
}

std::vector<std::string> FeatureCache::warnings() const {
    std::lock_guard lock(mutex_);
    return warnings_;
}

int FeatureCache::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

int FeatureCache::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

}  // namespace lungbench::bench
