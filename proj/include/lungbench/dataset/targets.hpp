#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lungbench/common/constants.hpp"
#include "lungbench/dataset/labels.hpp"

namespace lungbench::dataset {

struct SegmentTargets {
    EventClass klass = EventClass::I;
    std::vector<std::uint8_t> values;
};

// Frame k is positive iff k*hop lies in [start, end) of some event of
// `klass`. For the 469-frame resolution, value j is the max of fine frames
// 2j and 2j+1. Only (938, 0.016) and (469, 0.032) are accepted.
SegmentTargets make_segment_targets(std::span<const LabelEvent> labels, EventClass klass,
                                    int n_frames, double hop);

inline SegmentTargets make_segment_targets(std::span<const LabelEvent> labels, EventClass klass,
                                           int n_frames = kFrames) {
    return make_segment_targets(labels, klass, n_frames,
                                n_frames == kCoarseFrames ? 2 * kHopSeconds : kHopSeconds);
}

}  // namespace lungbench::dataset
