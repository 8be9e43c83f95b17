#include "lungbench/bench/reports.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lungbench/common/error.hpp"
#include "lungbench/common/format.hpp"

namespace lungbench::bench {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "NA";
    return format_fixed(v, 6);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

std::string exact(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_roundtrip(v);
}

class CsvFile {
public:
    CsvFile(const fs::path& path, std::vector<fs::path>& written) : path_(path), out_(path, std::ios::trunc) {
        if (!out_) throw Error("report.write", "cannot write " + path.string());
        written.push_back(path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
        if (!out_) throw Error("report.write", "write failed: " + path_.string());
    }

private:
    fs::path path_;
    std::ofstream out_;
};

std::string model_field(const nn::ModelConfig& m) {
    // Display names never contain commas; quoting is unnecessary.
    return m.name();
}

std::string cell_name(const CellResult& c) { return c.model.slug() + "_" + dataset::to_string(c.task); }

std::vector<std::string> metric_columns(const std::string& level) {
    return {level + "_accuracy", level + "_ppv", level + "_sensitivity", level + "_specificity", level + "_f1"};
}

void append_metrics(std::vector<std::string>& row, const eval::MetricSet& m) {
    row.push_back(num(m.accuracy));
    row.push_back(num(m.ppv));
    row.push_back(num(m.sensitivity));
    row.push_back(num(m.specificity));
    row.push_back(num(m.f1));
}

}  // namespace

double upper_tpr(const eval::RocCurve& curve, double fpr) {
    double best = 0.0;
    const auto& p = curve.points;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].fpr == fpr) best = std::max(best, p[k].tpr);
        if (k + 1 < p.size() && p[k].fpr < fpr && fpr < p[k + 1].fpr) {
            const double w = (fpr - p[k].fpr) / (p[k + 1].fpr - p[k].fpr);
            best = std::max(best, p[k].tpr + w * (p[k + 1].tpr - p[k].tpr));
        }
    }
    return best;
}

std::string format_breakdown(const ParamRow& row) {
    std::ostringstream out;
    out << row.model.name() << ": measured " << row.measured << ", reference "
        << (row.reference ? std::to_string(*row.reference) : std::string("none")) << '\n';
    for (const auto& [layer, n] : row.breakdown) out << "  " << layer << ' ' << n << '\n';
    return out.str();
}

std::vector<fs::path> emit_reports(const ReportBundle& bundle, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::vector<fs::path> written;

    {
        CsvFile csv(out_dir / "params.csv", written);
        csv.row({"model", "measured", "reference", "status"});
        for (const auto& p : bundle.params) {
            csv.row({model_field(p.model), std::to_string(p.measured),
                     p.reference ? std::to_string(*p.reference) : "NA",
                     !p.reference ? "no_reference" : (p.matches() ? "match" : "mismatch")});
        }
    }

    if (!bundle.cells.empty()) {
        CsvFile csv(out_dir / "f1_comparison.csv", written);
        std::vector<std::string> header = {"model", "parameters"};
        for (auto t : bundle.tasks) {
            header.push_back(std::string(dataset::to_string(t)) + "_segment_f1");
            header.push_back(std::string(dataset::to_string(t)) + "_event_f1");
        }
        csv.row(header);
        for (const auto& p : bundle.params) {
            std::vector<std::string> row = {model_field(p.model), std::to_string(p.measured)};
            for (auto t : bundle.tasks) {
                for (const auto& c : bundle.cells) {
                    if (c.model.slug() != p.model.slug() || c.task != t) continue;
                    if (c.status == CellStatus::ok) {
                        row.push_back(num(c.mean.segment.f1));
                        row.push_back(num(c.mean.event.f1));
                    } else {
                        row.push_back(to_string(c.status));
                        row.push_back(to_string(c.status));
                    }
                }
            }
            csv.row(row);
        }
    }

    for (auto t : bundle.tasks) {
        if (bundle.cells.empty()) break;
        const std::string task = dataset::to_string(t);
        CsvFile appendix(out_dir / ("appendix_metrics_" + task + ".csv"), written);
        std::vector<std::string> header = {"model", "status"};
        for (const auto& c : metric_columns("segment")) header.push_back(c);
        for (const auto& c : metric_columns("event")) header.push_back(c);
        header.push_back("auc");
        appendix.row(header);

        CsvFile folds(out_dir / ("fold_metrics_" + task + ".csv"), written);
        std::vector<std::string> fold_header = {"model",  "fold",      "train_recordings", "validation_recordings",
                                                "epochs", "best_epoch", "best_validation_loss"};
        for (const auto& c : metric_columns("segment")) fold_header.push_back(c);
        for (const auto& c : metric_columns("event")) fold_header.push_back(c);
        for (const char* c : {"event_tp", "event_fp", "event_fn", "auc"}) fold_header.push_back(c);
        folds.row(fold_header);

        for (const auto& c : bundle.cells) {
            if (c.task != t) continue;
            std::vector<std::string> row = {model_field(c.model), to_string(c.status)};
            if (c.status == CellStatus::ok) {
                append_metrics(row, c.mean.segment);
                append_metrics(row, c.mean.event);
                row.push_back(c.mean.auc_defined ? num(c.mean.auc) : "NA");
            } else {
                row.resize(row.size() + 11, to_string(c.status));
            }
            appendix.row(row);

            for (const auto& f : c.folds) {
                std::vector<std::string> fr = {model_field(c.model),
                                               std::to_string(f.fold),
                                               std::to_string(f.train_recordings),
                                               std::to_string(f.validation_recordings),
                                               std::to_string(f.epochs),
                                               std::to_string(f.best_epoch),
                                               num(f.best_validation_loss)};
                append_metrics(fr, f.test.segment);
                append_metrics(fr, f.test.event);
                fr.push_back(std::to_string(f.test.event_counts.tp));
                fr.push_back(std::to_string(f.test.event_counts.fp));
                fr.push_back(std::to_string(f.test.event_counts.fn));
                fr.push_back(f.test.roc.defined ? num(f.test.roc.auc) : "NA");
                folds.row(fr);
            }
        }
    }

    for (const auto& c : bundle.cells) {
        if (c.status != CellStatus::ok) continue;
        {
            CsvFile roc(out_dir / ("roc_" + cell_name(c) + ".csv"), written);
            roc.row({"fpr", "tpr"});
            std::vector<const eval::RocCurve*> curves;
            for (const auto& f : c.folds) {
                if (f.test.roc.defined) curves.push_back(&f.test.roc);
            }
            if (!curves.empty()) {
                for (int k = 0; k <= kRocGridSteps; ++k) {
                    const double fpr = static_cast<double>(k) / kRocGridSteps;
                    double tpr = 0.0;
                    for (const auto* curve : curves) tpr += upper_tpr(*curve, fpr);
                    roc.row({exact(fpr), num(tpr / static_cast<double>(curves.size()))});
                }
            }
        }
        {
            CsvFile roc(out_dir / ("roc_" + cell_name(c) + "_folds.csv"), written);
            roc.row({"fold", "threshold", "fpr", "tpr"});
            for (const auto& f : c.folds) {
                for (const auto& p : f.test.roc.points)
                    roc.row({std::to_string(f.fold), exact(p.threshold), exact(p.fpr), exact(p.tpr)});
            }
        }
        {
            CsvFile mape(out_dir / ("mape_" + cell_name(c) + ".csv"), written);
            mape.row({"threshold", "mape"});
            for (std::size_t k = 0; k < c.mean.mape_thresholds.size(); ++k)
                mape.row({exact(c.mean.mape_thresholds[k]), c.mean.mape_defined ? num(c.mean.mape[k]) : "NA"});
        }
        CsvFile mape(out_dir / ("mape_" + cell_name(c) + "_folds.csv"), written);
        std::vector<std::string> header = {"threshold"};
        for (const auto& f : c.folds) header.push_back("fold" + std::to_string(f.fold));
        mape.row(header);
        for (std::size_t k = 0; k < c.mean.mape_thresholds.size(); ++k) {
            std::vector<std::string> row = {exact(c.mean.mape_thresholds[k])};
            for (const auto& f : c.folds) row.push_back(f.test.mape.defined ? num(f.test.mape.mape[k]) : "NA");
            mape.row(row);
        }
    }

    const auto summary_path = out_dir / "summary.txt";
    std::ofstream s(summary_path, std::ios::trunc);
    if (!s) throw Error("report.write", "cannot write " + summary_path.string());
    written.push_back(summary_path);
    const auto& md = bundle.metadata;
    s << "lungbench " << md.version << "\n"
      << "seed " << md.seed << "\n"
      << "recordings " << md.recordings << " (test " << md.test_recordings << ")\n"
      << "feature cache " << md.cache_hits << " hits, " << md.cache_misses << " computed\n"
      << "featurize_seconds " << format_fixed(md.featurize_seconds, 2) << "\n"
      << "total_seconds " << format_fixed(md.total_seconds, 2) << "\n";
    s << "\ncells\n";
    if (bundle.cells.empty()) s << "  (none requested)\n";
    for (const auto& c : bundle.cells) {
        s << "  " << c.model.name() << " / " << dataset::to_string(c.task) << ": " << to_string(c.status);
        if (c.status == CellStatus::ok) {
            s << ", segment F1 " << num(c.mean.segment.f1) << ", event F1 " << num(c.mean.event.f1) << ", "
              << c.folds.size() << " folds, " << c.test_recordings << " test recordings";
            double train_s = 0.0;
            for (const auto& f : c.folds) train_s += f.train_seconds;
            s << ", train " << format_fixed(train_s, 1) << " s";
        } else if (c.status == CellStatus::skipped) {
            s << " (" << c.message << ")";
        } else {
            s << " [" << c.error_code << "] " << c.message;
        }
        s << '\n';
    }
    bool any_mismatch = false;
    for (const auto& p : bundle.params) {
        if (p.reference && !p.matches()) {
            if (!any_mismatch) s << "\nparameter count mismatches\n";
            any_mismatch = true;
            s << format_breakdown(p);
        }
    }
    if (!md.warnings.empty()) {
        s << "\nwarnings\n";
        for (const auto& w : md.warnings) s << "  " << w << '\n';
    }
    if (!s) throw Error("report.write", "write failed: " + summary_path.string());
    return written;
}

}  // namespace lungbench::bench
