#include "lungbench/dataset/targets.hpp"

#include <algorithm>
#include <cmath>

#include "lungbench/common/error.hpp"

namespace lungbench::dataset {

namespace {

std::vector<std::uint8_t> fine_targets(std::span<const LabelEvent> labels, EventClass klass) {
    std::vector<std::uint8_t> values(kFrames, 0);
    for (const auto& ev : labels) {
        if (ev.klass != klass) continue;
        for (int k = 0; k < kFrames; ++k) {
            const double t = frame_center_seconds(k);
            if (t >= ev.start && t < ev.end) values[k] = 1;
        }
    }
    return values;
}

}  // namespace

SegmentTargets make_segment_targets(std::span<const LabelEvent> labels, EventClass klass,
                                    int n_frames, double hop) {
    const bool fine = n_frames == kFrames && std::abs(hop - kHopSeconds) < 1e-12;
    const bool coarse = n_frames == kCoarseFrames && std::abs(hop - 2 * kHopSeconds) < 1e-12;
    if (!fine && !coarse) {
        throw Error("targets.shape", "segment targets support 938 frames at 0.016 s or 469 at 0.032 s");
    }
    SegmentTargets out;
    out.klass = klass;
    auto values = fine_targets(labels, klass);
    if (fine) {
        out.values = std::move(values);
        return out;
    }
    out.values.resize(kCoarseFrames);
    for (int j = 0; j < kCoarseFrames; ++j) {
        out.values[j] = std::max(values[2 * j], values[2 * j + 1]);
    }
    return out;
}

}  // namespace lungbench::dataset
