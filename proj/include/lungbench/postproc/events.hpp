#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lungbench/dataset/labels.hpp"
#include "lungbench/dsp/spectrogram.hpp"

namespace lungbench::postproc {

struct PostprocConfig {
    double threshold = 0.5;
    double merge_gap = 0.5;     // T, seconds
    double peak_tolerance = 25.0;  // P, Hz
    double min_duration = 0.05;  // seconds
    bool merge = true;

    void validate() const;
};

// Boundary comparisons (gap < T, |dp| < P, duration >= min) allow this much
// rounding noise in times and frequencies.
inline constexpr double kBoundaryTolerance = 1e-9;

struct EventInterval {
    double start = 0.0;
    double end = 0.0;
    double peak_freq = 0.0;  // Hz, within [0, 2000]
    // Per-bin magnitude sums over the event's frames; empty when the event
    // was built without a spectrogram.
    std::vector<double> profile;

    double duration() const { return end - start; }
    bool operator==(const EventInterval& o) const {
        return start == o.start && end == o.end && peak_freq == o.peak_freq;
    }
};

std::vector<std::uint8_t> binarize(std::span<const float> track, double threshold);
std::vector<std::uint8_t> binarize(std::span<const double> track, double threshold);

// 469 -> 938 by repeating each value twice.
std::vector<std::uint8_t> expand_coarse(std::span<const std::uint8_t> track);

// Maximal runs of ones become events spanning [center - hop/2, center + hop/2]
// of their first and last frame, clipped to [0, 15]. A 469-value track is
// expanded first. The peak is the lowest-frequency bin with the largest
// magnitude sum over the run (every bin of the spectrogram lies in 0-2000 Hz).
std::vector<EventInterval> assemble_events(std::span<const std::uint8_t> track, const dsp::Spectrogram* spec);
std::vector<EventInterval> assemble_events(std::span<const std::uint8_t> track, std::span<const double> frame_times,
                                           const dsp::Spectrogram* spec);

// Left-to-right scan merging neighbours with gap < T and |peak difference|
// < P; a merged event is compared again with the next one. The merged peak
// comes from the summed profiles (or the longer event without profiles).
// Input must be sorted by start and non-overlapping.
std::vector<EventInterval> merge_close_events(std::span<const EventInterval> events, double merge_gap,
                                              double peak_tolerance);

// Drops events strictly shorter than min_duration; order preserved.
std::vector<EventInterval> remove_bursts(std::span<const EventInterval> events, double min_duration);

// binarize -> assemble -> (merge -> remove_bursts) repeated until nothing
// changes, so running the last two stages again is a no-op.
std::vector<EventInterval> postprocess(std::span<const float> track, const dsp::Spectrogram* spec,
                                       const PostprocConfig& config);

// CSV "class,start,end,peak_freq".
void write_events_csv(std::ostream& out, dataset::EventClass klass, std::span<const EventInterval> events,
                      bool header = true);
void write_events_csv(const std::filesystem::path& path, dataset::EventClass klass,
                      std::span<const EventInterval> events);

struct ClassifiedEvent {
    dataset::EventClass klass;
    EventInterval interval;
};
std::vector<ClassifiedEvent> read_events_csv(const std::filesystem::path& path);

}  // namespace lungbench::postproc
