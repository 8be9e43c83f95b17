#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lungbench/bench/pipeline.hpp"

namespace lungbench::bench {

// Writes into `out_dir`:
//   params.csv                      measured vs reference parameter counts
//   f1_comparison.csv               fold-mean segment/event F1 per model x task
//   appendix_metrics_<task>.csv     all fold-mean metrics, "NA" where undefined
//   fold_metrics_<task>.csv         the same per fold
//   roc_<model>_<task>.csv          fpr,tpr: fold curves averaged vertically
//                                   on an FPR grid of step 0.01
//   roc_<model>_<task>_folds.csv    every fold's ROC points
//   mape_<model>_<task>.csv         threshold,mape: fold mean over the grid
//   mape_<model>_<task>_folds.csv   per-fold MAPE
//   summary.txt                     run metadata, timings, failures, warnings
// Only summary.txt carries timings, so the CSVs of two runs with the same
// inputs and seed are byte-identical. Returns the written paths.
std::vector<std::filesystem::path> emit_reports(const ReportBundle& bundle, const std::filesystem::path& out_dir);

inline constexpr int kRocGridSteps = 100;

// Highest TPR of the piecewise-linear ROC curve at `fpr` (the top of a
// vertical segment when several points share that FPR).
double upper_tpr(const eval::RocCurve& curve, double fpr);

// Per-layer listing used when a measured count differs from its reference.
std::string format_breakdown(const ParamRow& row);

}  // namespace lungbench::bench
