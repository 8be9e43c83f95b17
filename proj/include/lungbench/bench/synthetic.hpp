#pragma once

#include <cstdint>
#include <filesystem>

#include "lungbench/dataset/manifest.hpp"
#include "lungbench/dataset/synth.hpp"

namespace lungbench::bench {

struct SyntheticDatasetOptions {
    int recordings = 250;
    std::uint64_t seed = 0;
    int group_size = 2;  // consecutive recordings sharing one patient-day key
    double test_fraction = 0.2;
    int fold_count = 5;
    dataset::SynthesisParams params;
};

// Writes synthNNNN_rK.wav / synthNNNN_rK_label.txt pairs and manifest.tsv
// into `dir`, assigns group-level train/test splits and returns the
// manifest. Recording i uses seed mix_seed(options.seed, i).
dataset::DatasetManifest write_synthetic_dataset(const std::filesystem::path& dir,
                                                 const SyntheticDatasetOptions& options);

}  // namespace lungbench::bench
