#include "lungbench/bench/synthetic.hpp"

#include <cstdio>

#include "lungbench/common/error.hpp"
#include "lungbench/common/random.hpp"
#include "lungbench/dataset/audio.hpp"
#include "lungbench/dataset/labels.hpp"

namespace lungbench::bench {

dataset::DatasetManifest write_synthetic_dataset(const std::filesystem::path& dir,
                                                 const SyntheticDatasetOptions& options) {
    if (options.recordings < 1 || options.group_size < 1)
        throw Error("synth.options", "recordings and group_size must be positive");
    if (!(options.test_fraction >= 0.0 && options.test_fraction < 1.0))
        throw Error("synth.options", "test_fraction must lie in [0, 1)");
    dataset::validate(options.params);
    std::filesystem::create_directories(dir);

    dataset::DatasetManifest manifest;
    manifest.fold_count = options.fold_count;
    manifest.seed = options.seed;
    for (int i = 0; i < options.recordings; ++i) {
        const auto rec = dataset::synthesize_recording(options.params, mix_seed(options.seed, static_cast<std::uint64_t>(i)));
        char stem[64];
        std::snprintf(stem, sizeof(stem), "synth%04d_r%d", i / options.group_size, i % options.group_size);
        const auto wav = dir / (std::string(stem) + ".wav");
        const auto label = dir / (std::string(stem) + "_label.txt");
        dataset::write_wav(wav, rec.clip);
        dataset::write_label_file(label, rec.labels);

        dataset::RecordingRecord r;
        r.clip_ref = wav.string();
        r.label_ref = label.string();
        r.labels = rec.labels;
        r.group_key = dataset::derive_group_key(wav.filename().string());
        manifest.records.push_back(std::move(r));
    }
    dataset::assign_group_splits(manifest, options.test_fraction, options.seed);
    dataset::write_manifest(dir / "manifest.tsv", manifest);
    return manifest;
}

}  // namespace lungbench::bench
