#include "lungbench/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lungbench/common/error.hpp"

namespace lungbench::eval {

SegmentConfusion& SegmentConfusion::operator+=(const SegmentConfusion& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
}

EventConfusion& EventConfusion::operator+=(const EventConfusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
}

SegmentConfusion segment_confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> target) {
    if (pred.size() != target.size()) {
        throw Error("eval.shape", "prediction has " + std::to_string(pred.size()) + " frames, target " +
                                      std::to_string(target.size()));
    }
    SegmentConfusion c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] != 0, t = target[i] != 0;
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double jaccard(const TimeInterval& a, const TimeInterval& b) {
    const double inter = std::min(a.end, b.end) - std::max(a.start, b.start);
    if (inter <= 0.0) return 0.0;
    const double uni = std::max(a.end, b.end) - std::min(a.start, b.start);
    return inter / uni;
}

namespace {

void check_list(std::span<const TimeInterval> v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i].start < v[i].end)) throw Error("eval.events", std::string(what) + " event with end before start");
        if (i > 0 && v[i].start < v[i - 1].end) {
            throw Error("eval.events", std::string(what) + " events must be sorted and non-overlapping");
        }
    }
}

}  // namespace

MatchResult match_events(std::span<const TimeInterval> pred, std::span<const TimeInterval> gt) {
    check_list(pred, "predicted");
    check_list(gt, "ground-truth");
    struct Candidate {
        double ji;
        std::size_t p, g;
    };
    std::vector<Candidate> candidates;
    MatchResult result;
    result.best_jaccard.assign(pred.size(), 0.0);
    std::vector<bool> touched(gt.size(), false);
    for (std::size_t p = 0; p < pred.size(); ++p) {
        for (std::size_t g = 0; g < gt.size(); ++g) {
            const double ji = jaccard(pred[p], gt[g]);
            if (ji <= 0.0) continue;
            candidates.push_back({ji, p, g});
            touched[g] = true;
            result.best_jaccard[p] = std::max(result.best_jaccard[p], ji);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.ji > b.ji; });
    std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
    for (const auto& c : candidates) {
        if (pred_used[c.p] || gt_used[c.g]) continue;
        pred_used[c.p] = gt_used[c.g] = true;
        result.pairs.emplace_back(c.p, c.g);
    }
    for (double ji : result.best_jaccard) {
        if (ji > kMatchJaccard) ++result.counts.tp;
        else if (ji > 0.0) ++result.counts.fn;
        else ++result.counts.fp;
    }
    result.counts.fn += std::count(touched.begin(), touched.end(), false);
    return result;
}

namespace {

double ratio(std::int64_t num, std::int64_t den, unsigned flag, unsigned& undefined) {
    if (den == 0) {
        undefined |= flag;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double ppv, double sens, unsigned& undefined) {
    if (ppv + sens == 0.0) {
        undefined |= kUndefinedF1;
        return 0.0;
    }
    return 2.0 * ppv * sens / (ppv + sens);
}

}  // namespace

MetricSet basic_metrics(const SegmentConfusion& c) {
    MetricSet m;
    m.accuracy = ratio(c.tp + c.tn, c.total(), kUndefinedAccuracy, m.undefined);
    m.ppv = ratio(c.tp, c.tp + c.fp, kUndefinedPpv, m.undefined);
    m.sensitivity = ratio(c.tp, c.tp + c.fn, kUndefinedSensitivity, m.undefined);
    m.specificity = ratio(c.tn, c.tn + c.fp, kUndefinedSpecificity, m.undefined);
    m.f1 = f1_of(m.ppv, m.sensitivity, m.undefined);
    return m;
}

MetricSet basic_metrics(const EventConfusion& c) {
    MetricSet m;
    m.ppv = ratio(c.tp, c.tp + c.fp, kUndefinedPpv, m.undefined);
    m.sensitivity = ratio(c.tp, c.tp + c.fn, kUndefinedSensitivity, m.undefined);
    m.f1 = f1_of(m.ppv, m.sensitivity, m.undefined);
    return m;
}

namespace {

template <class T>
RocCurve roc_impl(std::span<const T> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw Error("eval.shape", "scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::int64_t positives = 0;
    for (auto l : labels) positives += l ? 1 : 0;
    const std::int64_t negatives = static_cast<std::int64_t>(labels.size()) - positives;

    RocCurve curve;
    curve.defined = positives > 0 && negatives > 0;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::int64_t tp = 0, fp = 0;
    // Twice the area in pair units: sum of d_fp * (tp_before + tp_after).
    long double twice_area = 0.0L;
    std::size_t i = 0;
    while (i < order.size()) {
        const T s = scores[order[i]];
        std::int64_t dtp = 0, dfp = 0;
        while (i < order.size() && scores[order[i]] == s) {
            if (labels[order[i]]) ++dtp;
            else ++dfp;
            ++i;
        }
        twice_area += static_cast<long double>(dfp) * static_cast<long double>(2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        curve.points.push_back({static_cast<double>(s),
                                negatives ? static_cast<double>(fp) / static_cast<double>(negatives) : 0.0,
                                positives ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0});
    }
    if (curve.defined) {
        curve.auc = static_cast<double>(twice_area / (2.0L * static_cast<long double>(positives) *
                                                      static_cast<long double>(negatives)));
    } else {
        curve.auc = std::numeric_limits<double>::quiet_NaN();
    }
    return curve;
}

}  // namespace

RocCurve roc_auc(std::span<const float> scores, std::span<const std::uint8_t> labels) {
    return roc_impl(scores, labels);
}

RocCurve roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    return roc_impl(scores, labels);
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) grid.push_back(k / 20.0);
    return grid;
}

MapeCurve mape_curve(std::span<const double> thresholds, std::span<const CountObservation> observations) {
    MapeCurve curve;
    curve.thresholds.assign(thresholds.begin(), thresholds.end());
    curve.mape.assign(thresholds.size(), 0.0);
    for (const auto& o : observations) {
        if (o.predicted.size() != thresholds.size()) {
            throw Error("eval.shape", "count observation does not match the threshold grid");
        }
        if (o.gt <= 0) continue;
        ++curve.recordings;
        for (std::size_t t = 0; t < thresholds.size(); ++t) {
            curve.mape[t] += std::abs(o.predicted[t] - o.gt) / static_cast<double>(o.gt) * 100.0;
        }
    }
    curve.defined = curve.recordings > 0;
    for (auto& v : curve.mape) {
        v = curve.defined ? v / curve.recordings : std::numeric_limits<double>::quiet_NaN();
    }
    return curve;
}

}  // namespace lungbench::eval
