#include "stackline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stackline/error.hpp"
#include "stackline/svg.hpp"

namespace stackline {

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions) {
    if (labels.size() != predictions.size()) {
        throw ShapeError("labels (" + std::to_string(labels.size()) + ") and predictions (" +
                         std::to_string(predictions.size()) + ") differ in length");
    }
    if (labels.empty()) throw StatError("confusion matrix of empty input");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        const int p = predictions[i];
        if ((y != 0 && y != 1) || (p != 0 && p != 1)) throw StatError("labels must be 0 or 1");
        if (y == 1) {
            (p == 1 ? m.tp : m.fn) += 1;
        } else {
            (p == 1 ? m.fp : m.tn) += 1;
        }
    }
    return m;
}

namespace {

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_degenerate = false;
    bool recall_degenerate = false;
    bool f1_degenerate = false;
};

ClassScores class_scores(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
    ClassScores s;
    if (tp + fp > 0) {
        s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    } else {
        s.precision_degenerate = true;
    }
    if (tp + fn > 0) {
        s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
        s.recall_degenerate = true;
    }
    if (s.precision + s.recall > 0.0) {
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    } else {
        s.f1_degenerate = true;
    }
    return s;
}

}  // namespace

Scores scores(const ConfusionMatrix& m) {
    if (m.tp < 0 || m.tn < 0 || m.fp < 0 || m.fn < 0) throw StatError("negative confusion count");
    const std::int64_t total = m.total();
    if (total == 0) throw StatError("scores of an empty confusion matrix");

    const ClassScores pos = class_scores(m.tp, m.fp, m.fn);
    const ClassScores neg = class_scores(m.tn, m.fn, m.fp);
    const double support_pos = static_cast<double>(m.tp + m.fn);
    const double support_neg = static_cast<double>(m.tn + m.fp);
    const double n = static_cast<double>(total);

    auto triple = [&](double p, double q) {
        return MetricTriple{p, 0.5 * (p + q), (support_pos * p + support_neg * q) / n};
    };

    Scores s;
    const double acc = static_cast<double>(m.tp + m.tn) / n;
    s.accuracy = {acc, acc, acc};
    s.precision = triple(pos.precision, neg.precision);
    s.recall = triple(pos.recall, neg.recall);
    s.f1 = triple(pos.f1, neg.f1);
    s.precision_degenerate = pos.precision_degenerate || neg.precision_degenerate;
    s.recall_degenerate = pos.recall_degenerate || neg.recall_degenerate;
    s.f1_degenerate = pos.f1_degenerate || neg.f1_degenerate;
    return s;
}

RocCurve roc_auc(std::span<const int> labels, std::span<const double> probabilities) {
    if (labels.size() != probabilities.size()) {
        throw ShapeError("labels and probabilities differ in length");
    }
    std::int64_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw StatError("labels must be 0 or 1");
        if (!std::isfinite(probabilities[i])) throw StatError("probabilities must be finite");
        (labels[i] == 1 ? n_pos : n_neg) += 1;
    }
    if (n_pos == 0 || n_neg == 0) throw StatError("AUC undefined: labels contain a single class");

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return probabilities[a] > probabilities[b];
    });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0});
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = probabilities[order[i]];
        while (i < order.size() && probabilities[order[i]] == threshold) {
            (labels[order[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
        roc.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                              static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    if (roc.points.back() != RocPoint{1.0, 1.0}) roc.points.push_back({1.0, 1.0});

    double area = 0.0;
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
        const auto& a = roc.points[k - 1];
        const auto& b = roc.points[k];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    roc.auc = area;
    return roc;
}

EvalReport evaluate(std::span<const int> labels, std::span<const double> probabilities,
                    std::string model, std::string split) {
    if (labels.size() != probabilities.size()) {
        throw ShapeError("labels and probabilities differ in length");
    }
    std::vector<int> predicted(probabilities.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) predicted[i] = probabilities[i] >= 0.5 ? 1 : 0;
    EvalReport r;
    r.model = std::move(model);
    r.split = std::move(split);
    r.matrix = confusion(labels, predicted);
    r.metrics = scores(r.matrix);
    r.roc = roc_auc(labels, probabilities);
    return r;
}

nlohmann::json EvalReport::to_json() const {
    auto triple = [](const MetricTriple& t) {
        return nlohmann::json{{"binary", t.binary}, {"macro", t.macro}, {"weighted", t.weighted}};
    };
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : roc.points) points.push_back({p.fpr, p.tpr});
    nlohmann::json doc;
    doc["format"] = "stackline.eval_report";
    doc["version"] = 1;
    doc["model"] = model;
    doc["split"] = split;
    doc["n"] = matrix.total();
    doc["confusion_matrix"] = {{"tp", matrix.tp}, {"tn", matrix.tn}, {"fp", matrix.fp}, {"fn", matrix.fn}};
    doc["accuracy"] = triple(metrics.accuracy);
    doc["precision"] = triple(metrics.precision);
    doc["recall"] = triple(metrics.recall);
    doc["f1"] = triple(metrics.f1);
    doc["degenerate"] = {{"precision", metrics.precision_degenerate},
                         {"recall", metrics.recall_degenerate},
                         {"f1", metrics.f1_degenerate}};
    doc["auc"] = roc.auc;
    doc["roc_points"] = points;
    return doc;
}

// ---------------------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string roc_svg(const std::vector<NamedCurve>& curves, const std::string& title) {
    const double left = 70, top = 50, size = 400;
    const double legend_h = 18.0 * static_cast<double>(curves.size());
    SvgWriter svg(left + size + 30, top + size + 60 + legend_h);
    auto px = [&](double fpr) { return left + size * fpr; };
    auto py = [&](double tpr) { return top + size * (1.0 - tpr); };

    svg.text(left + size / 2, 28, title, "middle", 15, true);
    svg.rect(left, top, size, size, "none", "#000000");
    for (int k = 0; k <= 5; ++k) {
        const double v = k / 5.0;
        svg.line(px(v), top + size, px(v), top + size + 5, "#000000", 1.0);
        svg.text(px(v), top + size + 18, svg_num(v, 1), "middle", 10);
        svg.line(left - 5, py(v), left, py(v), "#000000", 1.0);
        svg.text(left - 8, py(v) + 4, svg_num(v, 1), "end", 10);
    }
    svg.text(left + size / 2, top + size + 36, "False positive rate", "middle", 12);
    svg.text(18, top + size / 2, "True positive rate", "middle", 12);
    svg.line(px(0), py(0), px(1), py(1), "#999999", 1.0, "5,4");

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = kPalette[c % std::size(kPalette)];
        std::string pts;
        for (const auto& p : curves[c].curve.points) {
            if (!pts.empty()) pts += ' ';
            pts += svg_num(px(p.fpr)) + "," + svg_num(py(p.tpr));
        }
        svg.polyline(pts, color, 2.0);
        const double ly = top + size + 56 + 18.0 * static_cast<double>(c);
        svg.line(left, ly - 4, left + 24, ly - 4, color, 3.0);
        svg.text(left + 32, ly, curves[c].name + " (AUC = " + svg_num(curves[c].curve.auc, 3) + ")",
                 "start", 11);
    }
    return svg.str();
}

std::string confusion_svg(const ConfusionMatrix& m, const std::string& title) {
    const double left = 110, top = 70, cell = 130;
    SvgWriter svg(left + 2 * cell + 30, top + 2 * cell + 50);
    svg.text(left + cell, 28, title, "middle", 15, true);
    svg.text(left + cell, top - 22, "Predicted", "middle", 12, true);
    svg.text(left + cell / 2, top - 6, "0", "middle", 12);
    svg.text(left + 1.5 * cell, top - 6, "1", "middle", 12);
    svg.text(left - 60, top + cell, "Actual", "middle", 12, true);
    svg.text(left - 10, top + cell / 2 + 4, "0", "end", 12);
    svg.text(left - 10, top + 1.5 * cell + 4, "1", "end", 12);

    const std::int64_t counts[2][2] = {{m.tn, m.fp}, {m.fn, m.tp}};
    const std::int64_t peak = std::max<std::int64_t>(
        1, std::max(std::max(m.tn, m.fp), std::max(m.fn, m.tp)));
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const double shade = static_cast<double>(counts[r][c]) / static_cast<double>(peak);
            const int level = 255 - static_cast<int>(std::lround(shade * 180.0));
            char fill[8];
            std::snprintf(fill, sizeof fill, "#%02x%02xff", level, level);
            const double x = left + c * cell;
            const double y = top + r * cell;
            svg.rect(x, y, cell, cell, fill, "#333333");
            svg.text(x + cell / 2, y + cell / 2 + 8, std::to_string(counts[r][c]), "middle", 22, true,
                     shade > 0.6 ? "#ffffff" : "#000000");
        }
    }
    return svg.str();
}

}  // namespace stackline
