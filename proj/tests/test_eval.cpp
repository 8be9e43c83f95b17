#include <doctest.h>

#include <cmath>
#include <set>

#include "lungbench/common/error.hpp"
#include "lungbench/common/random.hpp"
#include "lungbench/eval/metrics.hpp"
#include "lungbench/eval/report.hpp"
#include "support/oracles.hpp"

using namespace lungbench;
using namespace lungbench::eval;

TEST_CASE("segment_confusion") {
    const std::vector<std::uint8_t> t = {1, 0, 1, 0, 1, 1};
    const auto same = segment_confusion(t, t);
    CHECK(same.fp == 0);
    CHECK(same.fn == 0);
    std::vector<std::uint8_t> inv(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) inv[i] = !t[i];
    const auto neg = segment_confusion(inv, t);
    CHECK(neg.tp == 0);
    CHECK(neg.tn == 0);
    const auto c = segment_confusion(std::vector<std::uint8_t>{1, 1, 0, 0}, std::vector<std::uint8_t>{1, 0, 1, 0});
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 1);
    CHECK(c.total() == 4);
    CHECK_THROWS_AS(segment_confusion(t, std::span<const std::uint8_t>(inv).subspan(0, 2)), Error);
}

TEST_CASE("jaccard") {
    CHECK(jaccard({1, 2}, {1, 2}) == 1.0);
    CHECK(jaccard({1, 2}, {3, 4}) == 0.0);
    CHECK(jaccard({1, 2}, {2, 3}) == 0.0);
    CHECK(jaccard({0, 2}, {1, 3}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("match_events worked examples") {
    const std::vector<TimeInterval> p = {{1.0, 2.0}};
    const std::vector<TimeInterval> g1 = {{1.1, 2.05}};
    const auto m1 = match_events(p, g1);
    CHECK(m1.best_jaccard[0] == doctest::Approx(0.9 / 1.05).epsilon(1e-12));
    CHECK(m1.counts == EventConfusion{1, 0, 0});

    const std::vector<TimeInterval> g2 = {{1.5, 2.5}};
    CHECK(match_events(p, g2).best_jaccard[0] == doctest::Approx(1.0 / 3.0));
    CHECK(match_events(p, g2).counts == EventConfusion{0, 0, 1});

    const std::vector<TimeInterval> p3 = {{5, 6}};
    const std::vector<TimeInterval> g3 = {{1, 2}};
    CHECK(match_events(p3, g3).counts == EventConfusion{0, 1, 1});

    CHECK(match_events({}, g3).counts == EventConfusion{0, 0, 1});
    CHECK(match_events(p3, {}).counts == EventConfusion{0, 1, 0});

    const std::vector<TimeInterval> bad = {{2, 3}, {1, 2}};
    CHECK_THROWS_AS(match_events(bad, g3), Error);
}

TEST_CASE("greedy matcher equals brute force") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = oracle::random_intervals(rng, 6);
        const auto g = oracle::random_intervals(rng, 6);
        const auto m = match_events(p, g);
        CHECK(m.counts == oracle::brute_force_match(p, g));
        // Pairs are one-to-one.
        std::set<std::size_t> ps, gs;
        for (auto [a, b] : m.pairs) {
            CHECK(ps.insert(a).second);
            CHECK(gs.insert(b).second);
        }
    }
}

TEST_CASE("basic_metrics") {
    auto all = basic_metrics(SegmentConfusion{1, 0, 1, 0});
    CHECK(*all.accuracy == 1.0);
    CHECK(all.ppv == 1.0);
    CHECK(all.sensitivity == 1.0);
    CHECK(*all.specificity == 1.0);
    CHECK(all.f1 == 1.0);
    CHECK(all.undefined == 0);

    auto zero = basic_metrics(SegmentConfusion{0, 3, 5, 2});
    CHECK(zero.ppv == 0.0);
    CHECK(zero.sensitivity == 0.0);
    CHECK(zero.f1 == 0.0);
    CHECK((zero.undefined & kUndefinedF1) != 0);

    auto m = basic_metrics(SegmentConfusion{70, 30, 870, 30});
    CHECK(m.ppv == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.sensitivity == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.f1 == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*m.accuracy == doctest::Approx(0.94).epsilon(1e-12));

    auto empty = basic_metrics(SegmentConfusion{});
    CHECK(*empty.accuracy == 0.0);
    CHECK((empty.undefined & kUndefinedAccuracy) != 0);

    auto ev = basic_metrics(EventConfusion{3, 1, 2});
    CHECK_FALSE(ev.accuracy.has_value());
    CHECK_FALSE(ev.specificity.has_value());
    CHECK(ev.ppv == 0.75);
    CHECK(ev.sensitivity == 0.6);
}

TEST_CASE("f1 identity") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const auto tp = static_cast<std::int64_t>(rng.below(50));
        const auto fp = static_cast<std::int64_t>(rng.below(50));
        const auto fn = static_cast<std::int64_t>(rng.below(50));
        const auto m = basic_metrics(EventConfusion{tp, fp, fn});
        const double direct = tp + fp + fn == 0 ? 0.0 : 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
        CHECK(std::abs(m.f1 - direct) <= 1e-12);
        CHECK(basic_metrics(EventConfusion{tp, fn, fp}).f1 == doctest::Approx(m.f1).epsilon(1e-12));
    }
}

TEST_CASE("roc_auc") {
    const std::vector<double> s1 = {0.9, 0.8, 0.3, 0.1};
    const std::vector<std::uint8_t> l1 = {1, 1, 0, 0};
    CHECK(roc_auc(s1, l1).auc == 1.0);
    const std::vector<double> s2 = {0.9, 0.6, 0.4, 0.1};
    const std::vector<std::uint8_t> l2 = {1, 0, 1, 0};
    CHECK(roc_auc(s2, l2).auc == 0.75);
    const std::vector<double> s3(6, 0.4);
    const std::vector<std::uint8_t> l3 = {1, 0, 1, 0, 0, 1};
    CHECK(roc_auc(s3, l3).auc == 0.5);
    const std::vector<std::uint8_t> one_class(4, 1);
    const auto undefined = roc_auc(s1, one_class);
    CHECK_FALSE(undefined.defined);
    CHECK(std::isnan(undefined.auc));

    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(199);
        std::vector<double> s(n);
        std::vector<std::uint8_t> l(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng.below(20)) / 19.0;
            l[i] = static_cast<std::uint8_t>(rng.below(2));
        }
        const auto r = roc_auc(s, l);
        if (!r.defined) continue;
        CHECK(std::abs(r.auc - oracle::mann_whitney(s, l)) <= 1e-12);
        for (std::size_t k = 1; k < r.points.size(); ++k) {
            CHECK(r.points[k].fpr >= r.points[k - 1].fpr);
            CHECK(r.points[k].tpr >= r.points[k - 1].tpr);
            CHECK(r.points[k].threshold < r.points[k - 1].threshold);
        }
        CHECK(r.points.back().fpr == 1.0);
        CHECK(r.points.back().tpr == 1.0);
    }
}

TEST_CASE("mape_curve") {
    const std::vector<double> grid = {0.5};
    const std::vector<CountObservation> perfect = {{3, {3}}, {0, {2}}};
    CHECK(mape_curve(grid, perfect).mape[0] == 0.0);
    const std::vector<CountObservation> obs = {{4, {5}}, {5, {4}}};
    CHECK(mape_curve(grid, obs).mape[0] == doctest::Approx(22.5).epsilon(1e-12));
    const std::vector<CountObservation> miss = {{4, {0}}, {7, {0}}};
    CHECK(mape_curve(grid, miss).mape[0] == 100.0);
    const std::vector<CountObservation> none = {{0, {1}}};
    CHECK_FALSE(mape_curve(grid, none).defined);

    const auto g = default_threshold_grid();
    REQUIRE(g.size() == 19);
    CHECK(g.front() == 0.05);
    CHECK(g[9] == 0.5);
    CHECK(g.back() == 0.95);
}

TEST_CASE("evaluate_task on a perfect predictor") {
    std::vector<RecordingEval> recs(3);
    for (int r = 0; r < 3; ++r) {
        auto& rec = recs[static_cast<std::size_t>(r)];
        rec.probs.assign(938, 0.0f);
        rec.targets.assign(938, 0);
        for (int k = 50 + 100 * r; k < 120 + 100 * r; ++k) {
            rec.probs[static_cast<std::size_t>(k)] = 1.0f;
            rec.targets[static_cast<std::size_t>(k)] = 1;
        }
        rec.gt_events.push_back({(50 + 100 * r) * 0.016, (119 + 100 * r) * 0.016});
    }
    const auto report = evaluate_task(recs, {});
    CHECK(report.recordings == 3);
    CHECK(report.segment.f1 == 1.0);
    CHECK(*report.segment.accuracy == 1.0);
    CHECK(report.event_counts == EventConfusion{3, 0, 0});
    CHECK(report.event.f1 == 1.0);
    CHECK(report.roc.auc == 1.0);
    REQUIRE(report.mape.defined);
    for (double v : report.mape.mape) CHECK(v == 0.0);
}
