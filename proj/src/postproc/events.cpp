#include "lungbench/postproc/events.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lungbench/common/constants.hpp"
#include "lungbench/common/error.hpp"
#include "lungbench/common/format.hpp"

namespace lungbench::postproc {

namespace {

template <class T>
std::vector<std::uint8_t> binarize_impl(std::span<const T> track, double threshold) {
    std::vector<std::uint8_t> out(track.size());
    for (std::size_t i = 0; i < track.size(); ++i) out[i] = static_cast<double>(track[i]) >= threshold ? 1 : 0;
    return out;
}

void set_peak(EventInterval& e, const std::vector<double>& bin_freqs) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < e.profile.size(); ++b) {
        if (e.profile[b] > e.profile[best]) best = b;
    }
    e.peak_freq = bin_freqs.empty() ? static_cast<double>(best) * kBinHz : bin_freqs[best];
}

bool mergeable(const EventInterval& a, const EventInterval& b, double gap, double tol) {
    return b.start - a.end < gap - kBoundaryTolerance && std::abs(b.peak_freq - a.peak_freq) < tol - kBoundaryTolerance;
}

EventInterval merge_pair(const EventInterval& a, const EventInterval& b) {
    EventInterval m;
    m.start = a.start;
    m.end = std::max(a.end, b.end);
    if (!a.profile.empty() && a.profile.size() == b.profile.size()) {
        m.profile = a.profile;
        for (std::size_t i = 0; i < m.profile.size(); ++i) m.profile[i] += b.profile[i];
        set_peak(m, {});
    } else {
        m.peak_freq = b.duration() > a.duration() ? b.peak_freq : a.peak_freq;
    }
    return m;
}

}  // namespace

void PostprocConfig::validate() const {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("postproc.config", "threshold must lie in [0, 1]");
    if (merge_gap < 0.0 || peak_tolerance < 0.0 || min_duration < 0.0) {
        throw Error("postproc.config", "postprocessing parameters must be non-negative");
    }
}

std::vector<std::uint8_t> binarize(std::span<const float> track, double threshold) {
    return binarize_impl(track, threshold);
}

std::vector<std::uint8_t> binarize(std::span<const double> track, double threshold) {
    return binarize_impl(track, threshold);
}

std::vector<std::uint8_t> expand_coarse(std::span<const std::uint8_t> track) {
    std::vector<std::uint8_t> out;
    out.reserve(track.size() * 2);
    for (auto v : track) {
        out.push_back(v);
        out.push_back(v);
    }
    return out;
}

std::vector<EventInterval> assemble_events(std::span<const std::uint8_t> track, const dsp::Spectrogram* spec) {
    std::vector<double> times(static_cast<std::size_t>(kFrames));
    for (int k = 0; k < kFrames; ++k) times[static_cast<std::size_t>(k)] = frame_center_seconds(k);
    return assemble_events(track, times, spec);
}

std::vector<EventInterval> assemble_events(std::span<const std::uint8_t> track, std::span<const double> frame_times,
                                           const dsp::Spectrogram* spec) {
    std::vector<std::uint8_t> expanded;
    if (track.size() * 2 == frame_times.size()) {
        expanded = expand_coarse(track);
        track = expanded;
    }
    if (track.size() != frame_times.size()) {
        throw Error("postproc.shape", "track has " + std::to_string(track.size()) + " frames, expected " +
                                          std::to_string(frame_times.size()));
    }
    if (spec && spec->magnitudes.rows() != static_cast<Eigen::Index>(track.size())) {
        throw Error("postproc.shape", "spectrogram frame count does not match the track");
    }
    const double half_hop = frame_times.size() > 1 ? 0.5 * (frame_times[1] - frame_times[0]) : 0.5 * kHopSeconds;

    std::vector<EventInterval> events;
    std::size_t k = 0;
    while (k < track.size()) {
        if (!track[k]) {
            ++k;
            continue;
        }
        const std::size_t first = k;
        while (k < track.size() && track[k]) ++k;
        const std::size_t last = k - 1;
        EventInterval e;
        e.start = std::max(0.0, frame_times[first] - half_hop);
        e.end = std::min(kClipSeconds, frame_times[last] + half_hop);
        if (spec) {
            const auto& mag = spec->magnitudes;
            e.profile.assign(static_cast<std::size_t>(mag.cols()), 0.0);
            for (std::size_t f = first; f <= last; ++f) {
                for (Eigen::Index b = 0; b < mag.cols(); ++b) {
                    e.profile[static_cast<std::size_t>(b)] += mag(static_cast<Eigen::Index>(f), b);
                }
            }
            set_peak(e, spec->bin_freqs);
        }
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<EventInterval> merge_close_events(std::span<const EventInterval> events, double merge_gap,
                                              double peak_tolerance) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!(events[i].start < events[i].end)) throw Error("postproc.order", "event with end before start");
        if (i > 0 && events[i].start < events[i - 1].end) {
            throw Error("postproc.order", "events must be sorted by start and non-overlapping");
        }
    }
    std::vector<EventInterval> out;
    for (const auto& e : events) {
        if (!out.empty() && mergeable(out.back(), e, merge_gap, peak_tolerance)) {
            out.back() = merge_pair(out.back(), e);
        } else {
            out.push_back(e);
        }
    }
    return out;
}

std::vector<EventInterval> remove_bursts(std::span<const EventInterval> events, double min_duration) {
    std::vector<EventInterval> out;
    for (const auto& e : events) {
        if (e.duration() >= min_duration - kBoundaryTolerance) out.push_back(e);
    }
    return out;
}

std::vector<EventInterval> postprocess(std::span<const float> track, const dsp::Spectrogram* spec,
                                       const PostprocConfig& config) {
    config.validate();
    const auto binary = binarize(track, config.threshold);
    auto events = spec ? assemble_events(binary, spec->frame_times, spec) : assemble_events(binary, nullptr);
    while (true) {
        const std::size_t before = events.size();
        if (config.merge) events = merge_close_events(events, config.merge_gap, config.peak_tolerance);
        events = remove_bursts(events, config.min_duration);
        if (events.size() == before) break;
    }
    return events;
}

void write_events_csv(std::ostream& out, dataset::EventClass klass, std::span<const EventInterval> events,
                      bool header) {
    if (header) out << "class,start,end,peak_freq\n";
    for (const auto& e : events) {
        out << dataset::to_string(klass) << ',' << format_roundtrip(e.start) << ',' << format_roundtrip(e.end) << ','
            << format_roundtrip(e.peak_freq) << '\n';
    }
}

void write_events_csv(const std::filesystem::path& path, dataset::EventClass klass,
                      std::span<const EventInterval> events) {
    std::ofstream out(path);
    if (!out) throw Error("io.open", "cannot write " + path.string());
    write_events_csv(out, klass, events);
}

std::vector<ClassifiedEvent> read_events_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("io.open", "cannot open " + path.string());
    std::vector<ClassifiedEvent> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.starts_with("class,"))) continue;
        std::stringstream ss(line);
        std::string cls, start, end, peak;
        if (!std::getline(ss, cls, ',') || !std::getline(ss, start, ',') || !std::getline(ss, end, ',') ||
            !std::getline(ss, peak, ',')) {
            throw Error("events.syntax", path.string() + ": line " + std::to_string(line_no) + ": expected 4 fields");
        }
        const auto klass = dataset::parse_event_class(cls);
        if (!klass) throw Error("events.class", path.string() + ": line " + std::to_string(line_no) + ": bad class");
        try {
            EventInterval e;
            e.start = std::stod(start);
            e.end = std::stod(end);
            e.peak_freq = std::stod(peak);
            out.push_back({*klass, e});
        } catch (const std::exception&) {
            throw Error("events.syntax", path.string() + ": line " + std::to_string(line_no) + ": bad number");
        }
    }
    return out;
}

}  // namespace lungbench::postproc
