#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "lungbench/common/matrix.hpp"
#include "lungbench/dsp/spectrogram.hpp"

namespace lungbench::bench {

// Features and spectrogram of one clip, as stored in the cache.
struct CachedFeatures {
    std::uint64_t clip_checksum = 0;
    std::shared_ptr<const RowMatrixF> features;        // 938 x 193
    std::shared_ptr<const dsp::Spectrogram> spectrogram;  // 938 x 129
};

// One file per (clip checksum, feature version):
//   "LBFEAT\0\0"  u32 feature version  u64 clip checksum
//   u32 rows  u32 cols  f32 features (row-major)
//   u32 rows  u32 cols  f64 magnitudes (row-major)
//   u64 FNV-1a of every preceding byte
// A damaged or mismatching entry is recomputed and rewritten; each such
// event is recorded in warnings().
class FeatureCache {
public:
    explicit FeatureCache(std::filesystem::path dir);

    // Reads and truncates the clip to 15 s before hashing, so the key does
    // not depend on container details.
    CachedFeatures get(const std::filesystem::path& wav_path);

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path entry_path(std::uint64_t clip_checksum) const;
    std::vector<std::string> warnings() const;
    int hits() const;
    int misses() const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    std::vector<std::string> warnings_;
    int hits_ = 0;
    int misses_ = 0;
};

std::uint64_t clip_checksum(std::span<const double> samples);

void write_cache_entry(const std::filesystem::path& path, const CachedFeatures& entry);
// Throws "cache.corrupt" on any structural or checksum problem.
CachedFeatures read_cache_entry(const std::filesystem::path& path);

}  // namespace lungbench::bench
