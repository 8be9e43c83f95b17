#pragma once

// Brute-force reference implementations used to cross-check the evaluators.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lungbench/common/random.hpp"
#include "lungbench/eval/metrics.hpp"

namespace oracle {

using lungbench::eval::EventConfusion;
using lungbench::eval::TimeInterval;

inline double overlap_ji(const TimeInterval& a, const TimeInterval& b) {
    const double lo = std::max(a.start, b.start), hi = std::min(a.end, b.end);
    if (hi <= lo) return 0.0;
    return (hi - lo) / ((a.end - a.start) + (b.end - b.start) - (hi - lo));
}

// Enumerates every one-to-one partial assignment, keeps one with the most
// JI > 0.5 pairs, then applies the taxonomy: assigned TP pairs count as TP,
// every other prediction is FN if it overlaps some ground truth and FP
// otherwise, and each ground truth overlapped by nothing adds an FN.
inline EventConfusion brute_force_match(std::span<const TimeInterval> pred, std::span<const TimeInterval> gt) {
    std::vector<int> assign(pred.size(), -1), best_assign;
    std::vector<bool> used(gt.size(), false);
    int best_tp = -1;
    std::function<void(std::size_t, int)> rec = [&](std::size_t p, int tp) {
        if (p == pred.size()) {
            if (tp > best_tp) {
                best_tp = tp;
                best_assign = assign;
            }
            return;
        }
        assign[p] = -1;
        rec(p + 1, tp);
        for (std::size_t g = 0; g < gt.size(); ++g) {
            if (used[g]) continue;
            used[g] = true;
            assign[p] = static_cast<int>(g);
            rec(p + 1, tp + (overlap_ji(pred[p], gt[g]) > 0.5 ? 1 : 0));
            used[g] = false;
        }
        assign[p] = -1;
    };
    rec(0, 0);

    EventConfusion c;
    for (std::size_t p = 0; p < pred.size(); ++p) {
        const int g = best_assign[p];
        if (g >= 0 && overlap_ji(pred[p], gt[static_cast<std::size_t>(g)]) > 0.5) {
            ++c.tp;
            continue;
        }
        bool overlaps = false;
        for (const auto& t : gt) overlaps = overlaps || overlap_ji(pred[p], t) > 0.0;
        if (overlaps) ++c.fn;
        else ++c.fp;
    }
    for (const auto& t : gt) {
        bool touched = false;
        for (const auto& q : pred) touched = touched || overlap_ji(q, t) > 0.0;
        if (!touched) ++c.fn;
    }
    return c;
}

// Sorted, non-overlapping intervals inside [0, 15]; endpoints are drawn from
// a coarse grid so exact touches, shared edges and JI == 0.5 cases occur.
inline std::vector<TimeInterval> random_intervals(lungbench::Rng& rng, int max_count) {
    const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_count + 1)));
    std::vector<double> cuts;
    for (int i = 0; i < 2 * n; ++i) cuts.push_back(static_cast<double>(rng.below(61)) * 0.25);
    std::sort(cuts.begin(), cuts.end());
    std::vector<TimeInterval> out;
    for (int i = 0; i < n; ++i) {
        const double a = cuts[static_cast<std::size_t>(2 * i)], b = cuts[static_cast<std::size_t>(2 * i + 1)];
        if (b > a && (out.empty() || a >= out.back().end)) out.push_back({a, b});
    }
    return out;
}

// P(score_pos > score_neg) + 0.5 P(tie) over all positive/negative pairs.
inline double mann_whitney(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    double wins = 0.0;
    std::int64_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace oracle
