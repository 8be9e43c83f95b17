#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lungbench/dataset/labels.hpp"

namespace lungbench::dataset {

enum class Split { train, validation, test, unassigned };

const char* to_string(Split split);
std::optional<Split> parse_split(std::string_view token);

struct RecordingRecord {
    std::string clip_ref;   // resolved path to the .wav
    std::string label_ref;  // resolved path to the label text, may be empty
    std::vector<LabelEvent> labels;
    std::string group_key;  // patient-day
    Split split = Split::unassigned;
};

struct DatasetManifest {
    std::vector<RecordingRecord> records;
    int fold_count = 5;
    std::uint64_t seed = 0;
};

// Tab-separated, one record per line after a header:
//   clip <TAB> labels <TAB> group <TAB> split
// Relative paths resolve against the manifest's directory. Lines starting
// with '#' are comments; "# fold_count=N" and "# seed=N" set those fields.
DatasetManifest read_manifest(const std::filesystem::path& path, bool load_labels = true);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Group key from a recording filename. A date token (YYYYMMDD or
// YYYY-MM-DD) yields "<device>_<date>"; otherwise the name is cut before its
// last '_'/'-' separated token (the location/round suffix).
std::string derive_group_key(std::string_view filename);

// Throws unless every record sharing a group_key has the same split.
void check_group_consistency(const DatasetManifest& manifest);

// Assigns `test_fraction` of the groups (rounded to nearest, at least one
// when possible) to test and the rest to train, deterministically.
void assign_group_splits(DatasetManifest& manifest, double test_fraction, std::uint64_t seed);

// Scans `root` recursively for "<name>.wav" files with a sibling
// "<name>_label.txt". A path component named train/test fixes the split.
DatasetManifest ingest_directory(const std::filesystem::path& root, double test_fraction,
                                 std::uint64_t seed);

}  // namespace lungbench::dataset
