#include "stackline/chi2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "stackline/svg.hpp"

namespace stackline {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// log(x^a e^-x / Gamma(a)), the common prefactor of both expansions.
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// P(a, x) = e^-x x^a / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n)), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(log_prefactor(a, x));
}

// Q(a, x) by the modified Lentz evaluation of the Legendre continued fraction, x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(log_prefactor(a, x)) * h;
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma requires a > 0");
    if (!(x >= 0.0) || std::isnan(x)) throw DomainError("incomplete gamma requires x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi2_sf(double statistic, int dof) {
    if (dof < 1) throw DomainError("chi-square needs at least one degree of freedom");
    if (std::isnan(statistic) || statistic < 0.0) {
        throw DomainError("chi-square statistic must be non-negative");
    }
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

// ---------------------------------------------------------------------------

ContingencyTable ContingencyTable::from_counts(std::vector<std::vector<std::int64_t>> counts) {
    const std::size_t n_cols = counts.empty() ? 0 : counts.front().size();
    for (const auto& row : counts) {
        if (row.size() != n_cols) throw ShapeError("contingency rows differ in length");
        for (auto v : row) {
            if (v < 0) throw StatError("contingency counts must be non-negative");
        }
    }
    std::vector<std::int64_t> col_sum(n_cols, 0);
    for (const auto& row : counts) {
        for (std::size_t j = 0; j < n_cols; ++j) col_sum[j] += row[j];
    }
    std::vector<std::size_t> keep_cols;
    for (std::size_t j = 0; j < n_cols; ++j) {
        if (col_sum[j] > 0) keep_cols.push_back(j);
    }

    ContingencyTable t;
    for (const auto& row : counts) {
        std::vector<std::int64_t> kept;
        std::int64_t total = 0;
        for (std::size_t j : keep_cols) {
            kept.push_back(row[j]);
            total += row[j];
        }
        if (total == 0) continue;
        t.counts_.push_back(std::move(kept));
        t.row_totals_.push_back(total);
        t.grand_total_ += total;
    }
    if (t.grand_total_ == 0) throw StatError("contingency table is empty");
    for (std::size_t j : keep_cols) t.col_totals_.push_back(col_sum[j]);
    return t;
}

ContingencyTable contingency(std::span<const int> feature_codes, std::span<const int> labels,
                             int n_levels) {
    if (feature_codes.size() != labels.size()) {
        throw ShapeError("feature codes and labels differ in length");
    }
    if (feature_codes.empty()) throw StatError("contingency of empty input");
    if (n_levels < 1) throw StatError("contingency needs at least one level");
    std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(n_levels),
                                                  std::vector<std::int64_t>(2, 0));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int code = feature_codes[i];
        const int label = labels[i];
        if (code < 0 || code >= n_levels) {
            throw StatError("feature code " + std::to_string(code) + " outside [0, " +
                            std::to_string(n_levels) + ")");
        }
        if (label != 0 && label != 1) throw StatError("labels must be 0 or 1");
        ++counts[static_cast<std::size_t>(code)][static_cast<std::size_t>(label)];
    }
    return ContingencyTable::from_counts(std::move(counts));
}

ChiSquareStatistic chi_square_statistic(const ContingencyTable& table) {
    if (table.degenerate()) throw StatError("degenerate table");
    const int dof = static_cast<int>((table.n_rows() - 1) * (table.n_cols() - 1));
    double stat = 0.0;
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        for (std::size_t j = 0; j < table.n_cols(); ++j) {
            const double expected = table.expected(i, j);
            const double diff = static_cast<double>(table.count(i, j)) - expected;
            stat += diff * diff / expected;
        }
    }
    return {stat, dof};
}

// ---------------------------------------------------------------------------

FeatureSelection select_features(const LabeledSet& train, const FittedEncoder& enc, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (train.size() == 0) throw StatError("feature selection on an empty training set");

    FeatureSelection sel;
    std::vector<int> codes(train.size());
    for (std::size_t j = 0; j < train.dims(); ++j) {
        const std::string& name = train.feature_names[j];
        const ColumnEncoding* col = enc.find(name);
        if (!col) throw SchemaError("encoder has no column '" + name + "'");

        for (std::size_t r = 0; r < train.size(); ++r) {
            const double v = train.features(r, j);
            codes[r] = col->kind == ColumnKind::categorical ? static_cast<int>(v) : col->bin_of(v);
        }
        ChiSquareResult res;
        res.feature_name = name;
        const ContingencyTable table = contingency(codes, train.labels, col->n_levels());
        if (table.degenerate()) {
            res.degenerate = true;
        } else {
            const auto [stat, dof] = chi_square_statistic(table);
            res.statistic = stat;
            res.dof = dof;
            res.p_value = chi2_sf(stat, dof);
            res.kept = res.p_value < alpha;
        }
        sel.results.push_back(res);
    }
    for (const auto& r : sel.results) {
        if (r.kept) sel.kept.push_back(r.feature_name);
    }
    std::stable_sort(sel.results.begin(), sel.results.end(),
                     [](const ChiSquareResult& a, const ChiSquareResult& b) {
                         if (a.p_value != b.p_value) return a.p_value < b.p_value;
                         return a.feature_name < b.feature_name;
                     });
    if (sel.kept.empty()) {
        throw SelectionError("no feature reached p < " + format_number(alpha) +
                             "; consider a larger alpha");
    }
    return sel;
}

std::string selection_csv(const FeatureSelection& selection) {
    std::ostringstream out;
    out << "feature,statistic,dof,p_value,kept\n";
    char buf[64];
    for (const auto& r : selection.results) {
        std::string name = r.feature_name;
        if (name.find_first_of(",\"") != std::string::npos) {
            std::string q = "\"";
            for (char ch : name) {
                if (ch == '"') q += '"';
                q += ch;
            }
            name = q + "\"";
        }
        out << name << ',';
        std::snprintf(buf, sizeof buf, "%.10g", r.statistic);
        out << buf << ',' << r.dof << ',';
        std::snprintf(buf, sizeof buf, "%.6e", r.p_value);
        out << buf << ',' << (r.kept ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string selection_svg(const FeatureSelection& selection, double alpha) {
    const auto& res = selection.results;
    const double bar_h = 22.0;
    const double left = 230.0;
    const double plot_w = 420.0;
    const double top = 40.0;
    const double height = top + bar_h * static_cast<double>(res.size()) + 50.0;
    const double width = left + plot_w + 40.0;

    // -log10(p) with p = 0 clamped to the smallest positive double.
    auto score = [](double p) {
        return -std::log10(std::max(p, std::numeric_limits<double>::min()));
    };
    double max_score = -std::log10(alpha);
    for (const auto& r : res) max_score = std::max(max_score, score(r.p_value));
    max_score *= 1.05;
    const auto x_of = [&](double s) { return left + plot_w * s / max_score; };

    SvgWriter svg(width, height);
    svg.text(width / 2, 22, "Chi-square significance (-log10 p)", "middle", 15, true);
    for (std::size_t i = 0; i < res.size(); ++i) {
        const double y = top + bar_h * static_cast<double>(i);
        svg.text(left - 8, y + bar_h * 0.68, res[i].feature_name, "end", 12);
        const double s = score(res[i].p_value);
        svg.rect(left, y + 3, x_of(s) - left, bar_h - 6, res[i].kept ? "#3b6ea8" : "#b0b0b0");
        svg.text(x_of(s) + 4, y + bar_h * 0.68, svg_num(s, 2), "start", 10);
    }
    const double axis_y = top + bar_h * static_cast<double>(res.size());
    svg.line(left, top, left, axis_y, "#000000", 1.0);
    svg.line(left, axis_y, left + plot_w, axis_y, "#000000", 1.0);
    const double cut = x_of(-std::log10(alpha));
    svg.line(cut, top - 4, cut, axis_y, "#c0392b", 1.0, "4,3");
    svg.text(cut, axis_y + 30, "alpha = " + svg_num(alpha, 3), "middle", 11);
    for (int k = 0; k <= 4; ++k) {
        const double s = max_score * k / 4.0;
        svg.line(x_of(s), axis_y, x_of(s), axis_y + 4, "#000000", 1.0);
        svg.text(x_of(s), axis_y + 16, svg_num(s, 1), "middle", 10);
    }
    return svg.str();
}

}  // namespace stackline
