#include "lungbench/eval/report.hpp"

#include "lungbench/common/parallel.hpp"

namespace lungbench::eval {

std::vector<TimeInterval> to_intervals(std::span<const postproc::EventInterval> events) {
    std::vector<TimeInterval> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back({e.start, e.end});
    return out;
}

MetricSet macro_average(std::span<const MetricSet> sets) {
    MetricSet m;
    if (sets.empty()) return m;
    double acc = 0.0, spec = 0.0;
    bool has_acc = true, has_spec = true;
    for (const auto& s : sets) {
        m.ppv += s.ppv;
        m.sensitivity += s.sensitivity;
        m.f1 += s.f1;
        has_acc = has_acc && s.accuracy.has_value();
        has_spec = has_spec && s.specificity.has_value();
        acc += s.accuracy.value_or(0.0);
        spec += s.specificity.value_or(0.0);
        m.undefined |= s.undefined;
    }
    const auto n = static_cast<double>(sets.size());
    m.ppv /= n;
    m.sensitivity /= n;
    m.f1 /= n;
    if (has_acc) m.accuracy = acc / n;
    if (has_spec) m.specificity = spec / n;
    return m;
}

TaskReport evaluate_task(std::span<const RecordingEval> recordings, const postproc::PostprocConfig& config,
                         int workers) {
    config.validate();
    const auto grid = default_threshold_grid();
    struct PerRecording {
        SegmentConfusion seg;
        MetricSet seg_metrics;
        EventConfusion events;
        CountObservation counts;
    };
    std::vector<PerRecording> per(recordings.size());
    parallel_for(recordings.size(), workers, [&](std::size_t i) {
        const auto& r = recordings[i];
        auto& out = per[i];
        out.seg = segment_confusion(postproc::binarize(r.probs, config.threshold), r.targets);
        out.seg_metrics = basic_metrics(out.seg);
        const auto events = postproc::postprocess(r.probs, r.spectrogram, config);
        out.events = match_events(to_intervals(events), r.gt_events).counts;
        out.counts.gt = static_cast<int>(r.gt_events.size());
        for (double t : grid) {
            auto c = config;
            c.threshold = t;
            out.counts.predicted.push_back(static_cast<int>(postproc::postprocess(r.probs, r.spectrogram, c).size()));
        }
    });

    TaskReport report;
    report.recordings = static_cast<int>(recordings.size());
    std::vector<MetricSet> seg_sets;
    std::vector<CountObservation> counts;
    std::vector<float> scores;
    std::vector<std::uint8_t> labels;
    for (std::size_t i = 0; i < per.size(); ++i) {
        report.segment_counts += per[i].seg;
        report.event_counts += per[i].events;
        seg_sets.push_back(per[i].seg_metrics);
        if (per[i].seg_metrics.undefined) ++report.segment_undefined;
        counts.push_back(per[i].counts);
        scores.insert(scores.end(), recordings[i].probs.begin(), recordings[i].probs.end());
        labels.insert(labels.end(), recordings[i].targets.begin(), recordings[i].targets.end());
    }
    report.segment = macro_average(seg_sets);
    report.event = basic_metrics(report.event_counts);
    report.roc = roc_auc(scores, labels);
    report.mape = mape_curve(grid, counts);
    return report;
}

}  // namespace lungbench::eval
