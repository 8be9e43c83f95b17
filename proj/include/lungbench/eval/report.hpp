#pragma once

#include <span>
#include <vector>

#include "lungbench/dsp/spectrogram.hpp"
#include "lungbench/eval/metrics.hpp"
#include "lungbench/postproc/events.hpp"

namespace lungbench::eval {

// One test recording for one task. `probs` and `targets` share the model's
// frame resolution (938, or 469 for CNN variants).
struct RecordingEval {
    std::vector<float> probs;
    std::vector<std::uint8_t> targets;
    std::vector<TimeInterval> gt_events;
    const dsp::Spectrogram* spectrogram = nullptr;  // for event peaks; may be null
};

struct TaskReport {
    int recordings = 0;
    MetricSet segment;                // macro average over recordings
    SegmentConfusion segment_counts;  // summed
    int segment_undefined = 0;        // recordings with at least one 0/0 ratio
    MetricSet event;                  // from the summed event confusion
    EventConfusion event_counts;
    RocCurve roc;    // micro-aggregated over all frames
    MapeCurve mape;  // event counts over the threshold grid
};

std::vector<TimeInterval> to_intervals(std::span<const postproc::EventInterval> events);

MetricSet macro_average(std::span<const MetricSet> sets);

TaskReport evaluate_task(std::span<const RecordingEval> recordings, const postproc::PostprocConfig& config,
                         int workers = 1);

}  // namespace lungbench::eval
