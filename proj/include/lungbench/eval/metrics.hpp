#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lungbench::eval {

struct SegmentConfusion {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::int64_t total() const { return tp + fp + tn + fn; }
    SegmentConfusion& operator+=(const SegmentConfusion& o);
};

// No true negatives exist at event level.
struct EventConfusion {
    std::int64_t tp = 0, fp = 0, fn = 0;
    EventConfusion& operator+=(const EventConfusion& o);
    bool operator==(const EventConfusion&) const = default;
};

SegmentConfusion segment_confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> target);

struct TimeInterval {
    double start = 0.0;
    double end = 0.0;
};

// |a & b| / |a | b|; 0 for disjoint intervals.
double jaccard(const TimeInterval& a, const TimeInterval& b);

inline constexpr double kMatchJaccard = 0.5;

struct MatchResult {
    EventConfusion counts;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (pred, gt), greedy one-to-one
    std::vector<double> best_jaccard;                       // per prediction
};

// Predictions are paired greedily in descending JI order to unused ground
// truth. A prediction whose best JI exceeds 0.5 is a TP, best JI in (0, 0.5]
// is an FN, no overlap is an FP; ground-truth events overlapped by no
// prediction add one FN each. Both lists must be sorted and non-overlapping.
MatchResult match_events(std::span<const TimeInterval> pred, std::span<const TimeInterval> gt);

enum MetricFlag : unsigned {
    kUndefinedAccuracy = 1u << 0,
    kUndefinedPpv = 1u << 1,
    kUndefinedSensitivity = 1u << 2,
    kUndefinedSpecificity = 1u << 3,
    kUndefinedF1 = 1u << 4,
};

// Ratios with 0/0 reported as 0 and the matching bit set in `undefined`.
// Accuracy and specificity are absent at event level.
struct MetricSet {
    std::optional<double> accuracy;
    double ppv = 0.0;
    double sensitivity = 0.0;
    std::optional<double> specificity;
    double f1 = 0.0;
    unsigned undefined = 0;
};

MetricSet basic_metrics(const SegmentConfusion& c);
MetricSet basic_metrics(const EventConfusion& c);

struct RocPoint {
    double threshold;  // scores >= threshold are positive
    double fpr;
    double tpr;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0, 0) at +inf to (1, 1)
    double auc = 0.0;
    bool defined = false;  // false when the labels hold a single class
};

// One operating point per distinct score, trapezoidal area. Tied scores
// move along the diagonal, which counts each tied pair as one half.
RocCurve roc_auc(std::span<const float> scores, std::span<const std::uint8_t> labels);
RocCurve roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// 0.05, 0.10, ..., 0.95.
std::vector<double> default_threshold_grid();

struct CountObservation {
    int gt = 0;
    std::vector<int> predicted;  // per grid threshold
};

struct MapeCurve {
    std::vector<double> thresholds;
    std::vector<double> mape;  // percent
    int recordings = 0;        // with gt > 0
    bool defined = false;
};

// Mean over recordings with gt > 0 of |pred - gt| / gt * 100.
MapeCurve mape_curve(std::span<const double> thresholds, std::span<const CountObservation> observations);

}  // namespace lungbench::eval
