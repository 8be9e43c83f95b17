#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "lungbench/common/error.hpp"
#include "lungbench/common/random.hpp"
#include "lungbench/postproc/events.hpp"

using namespace lungbench;
using namespace lungbench::postproc;

namespace {

EventInterval ev(double s, double e, double p) {
    EventInterval out;
    out.start = s;
    out.end = e;
    out.peak_freq = p;
    return out;
}

dsp::Spectrogram flat_spectrogram() {
    dsp::Spectrogram spec;
    spec.magnitudes = RowMatrixD::Zero(938, 129);
    for (int k = 0; k < 938; ++k) spec.frame_times.push_back(k * 0.016);
    for (int b = 0; b < 129; ++b) spec.bin_freqs.push_back(b * 15.625);
    return spec;
}

// Total length of the union of intervals.
double coverage(std::vector<EventInterval> v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    double total = 0.0, cur_s = -1.0, cur_e = -1.0;
    for (const auto& e : v) {
        if (e.start > cur_e) {
            total += cur_e - cur_s;
            cur_s = e.start;
            cur_e = e.end;
        } else {
            cur_e = std::max(cur_e, e.end);
        }
    }
    return total + (cur_e - cur_s);
}

bool covered_by(const EventInterval& e, const std::vector<EventInterval>& v) {
    return std::any_of(v.begin(), v.end(), [&](const auto& o) { return o.start <= e.start && e.end <= o.end; });
}

}  // namespace

TEST_CASE("binarize") {
    const std::vector<float> a = {0.4f, 0.6f};
    CHECK(binarize(a, 0.5) == std::vector<std::uint8_t>{0, 1});
    CHECK(binarize(a, 0.0) == std::vector<std::uint8_t>{1, 1});
    const std::vector<double> tie = {0.5};
    CHECK(binarize(tie, 0.5) == std::vector<std::uint8_t>{1});
    CHECK(expand_coarse(std::vector<std::uint8_t>{1, 0, 1}) == std::vector<std::uint8_t>{1, 1, 0, 0, 1, 1});
}

TEST_CASE("assemble_events") {
    std::vector<std::uint8_t> track(938, 0);
    CHECK(assemble_events(track, nullptr).empty());

    std::fill(track.begin() + 63, track.begin() + 125, 1);
    auto spec = flat_spectrogram();
    for (int k = 63; k <= 124; ++k) {
        spec.magnitudes(k, 13) = 1.0;  // 203.125 Hz
        spec.magnitudes(k, 20) = 1.0;  // tie, higher bin loses
    }
    const auto one = assemble_events(track, &spec);
    REQUIRE(one.size() == 1);
    CHECK(one[0].start == doctest::Approx(1.000).epsilon(1e-12));
    CHECK(one[0].end == doctest::Approx(1.992).epsilon(1e-12));
    CHECK(one[0].peak_freq == 203.125);

    track[90] = 0;
    CHECK(assemble_events(track, nullptr).size() == 2);

    std::vector<std::uint8_t> edges(938, 0);
    edges[0] = edges[937] = 1;
    const auto e = assemble_events(edges, nullptr);
    REQUIRE(e.size() == 2);
    CHECK(e[0].start == 0.0);
    CHECK(e[1].end == 15.0);

    std::vector<std::uint8_t> coarse(469, 0);
    coarse[10] = 1;
    const auto c = assemble_events(coarse, nullptr);
    REQUIRE(c.size() == 1);
    CHECK(c[0].start == doctest::Approx(20 * 0.016 - 0.008));
    CHECK(c[0].end == doctest::Approx(21 * 0.016 + 0.008));

    CHECK_THROWS_AS(assemble_events(std::vector<std::uint8_t>(100, 0), nullptr), Error);
}

TEST_CASE("merge rule worked examples") {
    const std::vector<EventInterval> ab = {ev(1.0, 1.5, 200), ev(1.8, 2.4, 210)};
    const auto merged = merge_close_events(ab, 0.5, 25);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].start == 1.0);
    CHECK(merged[0].end == 2.4);

    const std::vector<EventInterval> far = {ev(1.0, 1.5, 200), ev(2.1, 2.4, 210)};
    CHECK(merge_close_events(far, 0.5, 25).size() == 2);
    const std::vector<EventInterval> apart = {ev(1.0, 1.5, 200), ev(1.8, 2.4, 240)};
    CHECK(merge_close_events(apart, 0.5, 25).size() == 2);

    // Strict comparisons at the exact boundaries.
    const std::vector<EventInterval> gap_eq = {ev(1.0, 1.5, 200), ev(2.0, 2.4, 200)};
    CHECK(merge_close_events(gap_eq, 0.5, 25).size() == 2);
    const std::vector<EventInterval> tol_eq = {ev(1.0, 1.5, 200), ev(1.6, 2.4, 225)};
    CHECK(merge_close_events(tol_eq, 0.5, 25).size() == 2);

    // A merged event is tested again against the next one.
    const std::vector<EventInterval> chain = {ev(1.0, 1.2, 200), ev(1.4, 1.6, 205), ev(1.9, 2.0, 215)};
    const auto c = merge_close_events(chain, 0.5, 25);
    REQUIRE(c.size() == 1);
    CHECK(c[0].end == 2.0);
    CHECK(c[0].peak_freq == 205);  // longer event wins without profiles

    const std::vector<EventInterval> overlap = {ev(1.0, 2.0, 200), ev(1.5, 2.4, 200)};
    CHECK_THROWS_AS(merge_close_events(overlap, 0.5, 25), Error);
    const std::vector<EventInterval> unsorted = {ev(3.0, 4.0, 200), ev(1.0, 2.0, 200)};
    CHECK_THROWS_AS(merge_close_events(unsorted, 0.5, 25), Error);
}

TEST_CASE("merged peak comes from the union of profiles") {
    auto spec = flat_spectrogram();
    std::vector<std::uint8_t> track(938, 0);
    for (int k = 10; k < 20; ++k) {
        track[static_cast<std::size_t>(k)] = 1;
        spec.magnitudes(k, 13) = 1.0;
        spec.magnitudes(k, 14) = 0.6;
    }
    for (int k = 25; k < 30; ++k) {
        track[static_cast<std::size_t>(k)] = 1;
        spec.magnitudes(k, 14) = 1.5;
    }
    const auto parts = assemble_events(track, &spec);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].peak_freq == 13 * 15.625);
    CHECK(parts[1].peak_freq == 14 * 15.625);
    const auto merged = merge_close_events(parts, 0.5, 25);
    REQUIRE(merged.size() == 1);
    // bin 13: 10, bin 14: 6 + 7.5
    CHECK(merged[0].peak_freq == 14 * 15.625);
}

TEST_CASE("burst removal worked examples") {
    const std::vector<EventInterval> short_one = {ev(2.00, 2.04, 100)};
    CHECK(remove_bursts(short_one, 0.05).empty());
    const std::vector<EventInterval> boundary = {ev(2.00, 2.05, 100)};
    REQUIRE(remove_bursts(boundary, 0.05).size() == 1);
    CHECK(remove_bursts(boundary, 0.05)[0] == boundary[0]);
    CHECK(remove_bursts(std::vector<EventInterval>{}, 0.05).empty());
    const std::vector<EventInterval> mixed = {ev(1, 2, 1), ev(3, 3.01, 2), ev(4, 5, 3)};
    const auto kept = remove_bursts(mixed, 0.05);
    REQUIRE(kept.size() == 2);
    CHECK(kept[1].peak_freq == 3);
}

TEST_CASE("pipeline properties on random tracks") {
    Rng rng(31);
    PostprocConfig cfg;
    for (int trial = 0; trial < 200; ++trial) {
        auto spec = flat_spectrogram();
        for (Eigen::Index i = 0; i < spec.magnitudes.size(); ++i) spec.magnitudes.data()[i] = rng.uniform();
        std::vector<float> track(938);
        float level = 0.0f;
        for (auto& v : track) {
            if (rng.uniform() < 0.08) level = static_cast<float>(rng.uniform());
            v = level;
        }
        const auto binary = binarize(track, cfg.threshold);
        const auto assembled = assemble_events(binary, &spec);
        const auto merged = merge_close_events(assembled, cfg.merge_gap, cfg.peak_tolerance);
        const auto cleaned = remove_bursts(merged, cfg.min_duration);
        CHECK(merged.size() <= assembled.size());
        CHECK(cleaned.size() <= merged.size());
        for (const auto& e : assembled) CHECK(covered_by(e, merged));
        CHECK(coverage(merged) >= coverage(assembled) - 1e-12);

        const auto out = postprocess(track, &spec, cfg);
        const auto again = postprocess(track, &spec, cfg);
        CHECK(out == again);
        CHECK(remove_bursts(merge_close_events(out, cfg.merge_gap, cfg.peak_tolerance), cfg.min_duration) == out);
        for (const auto& e : out) {
            CHECK(e.duration() >= cfg.min_duration - kBoundaryTolerance);
            CHECK(e.start < e.end);
            CHECK(e.peak_freq >= 0.0);
            CHECK(e.peak_freq <= 2000.0);
        }
    }
}

TEST_CASE("event csv round trip") {
    const std::vector<EventInterval> events = {ev(0.1, 0.2, 15.625), ev(1.0 / 3.0, 2.5, 2000)};
    const auto path = std::filesystem::temp_directory_path() / "lungbench_events.csv";
    write_events_csv(path, dataset::EventClass::I, events);
    const auto back = read_events_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].klass == dataset::EventClass::I);
    CHECK(back[1].interval == events[1]);
    std::ostringstream os;
    write_events_csv(os, dataset::EventClass::D, events);
    CHECK(os.str().starts_with("class,start,end,peak_freq\nD,0.1,0.2,15.625\n"));
    std::filesystem::remove(path);
}
