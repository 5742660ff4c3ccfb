#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace stackline {

/// Binary confusion counts with class 1 as the positive class.
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions);

/// One metric under three averaging conventions.
struct MetricTriple {
    double binary = 0.0;    // class 1 as positive
    double macro = 0.0;     // unweighted mean over both classes
    double weighted = 0.0;  // support-weighted mean over both classes
};

struct Scores {
    MetricTriple accuracy;
    MetricTriple precision;
    MetricTriple recall;
    MetricTriple f1;
    /// Set when a ratio had a zero denominator and was reported as 0.
    bool precision_degenerate = false;
    bool recall_degenerate = false;
    bool f1_degenerate = false;
};

/// Accuracy, precision, recall and F1. Zero denominators yield 0 and set the
/// corresponding degenerate flag. Throws StatError on an empty matrix.
Scores scores(const ConfusionMatrix& m);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// ROC by a descending threshold sweep over distinct probabilities, tied
/// scores entering together, with (0,0) first and (1,1) last; AUC by the
/// trapezoidal rule. Throws StatError("AUC undefined") on single-class labels.
RocCurve roc_auc(std::span<const int> labels, std::span<const double> probabilities);

struct EvalReport {
    std::string model;
    std::string split;
    ConfusionMatrix matrix;
    Scores metrics;
    RocCurve roc;

    nlohmann::json to_json() const;
};

/// Thresholds probabilities at 0.5 and computes the full report.
EvalReport evaluate(std::span<const int> labels, std::span<const double> probabilities,
                    std::string model = {}, std::string split = {});

struct NamedCurve {
    std::string name;
    RocCurve curve;
};

/// ROC curves on unit axes with the chance diagonal and an AUC legend.
std::string roc_svg(const std::vector<NamedCurve>& curves, const std::string& title);

/// 2x2 count grid, actual classes as rows and predictions as columns.
std::string confusion_svg(const ConfusionMatrix& m, const std::string& title);

}  // namespace stackline
