#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stackline/frame.hpp"
#include "stackline/preprocess.hpp"

namespace stackline {

/// Regularized lower incomplete gamma P(a, x). Series expansion for
/// x < a + 1, Lentz continued fraction for the complement otherwise.
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution: P(X >= statistic) for `dof`
/// degrees of freedom. Throws DomainError on a negative or non-finite
/// statistic and on dof < 1.
double chi2_sf(double statistic, int dof);

/// Observed counts of feature level (rows) against class (columns), with
/// all-zero rows and columns removed.
class ContingencyTable {
public:
    /// Removes all-zero rows and columns; throws StatError on an empty table.
    static ContingencyTable from_counts(std::vector<std::vector<std::int64_t>> counts);

    std::size_t n_rows() const { return counts_.size(); }
    std::size_t n_cols() const { return counts_.empty() ? 0 : counts_.front().size(); }
    std::int64_t count(std::size_t i, std::size_t j) const { return counts_[i][j]; }
    const std::vector<std::vector<std::int64_t>>& counts() const { return counts_; }
    const std::vector<std::int64_t>& row_totals() const { return row_totals_; }
    const std::vector<std::int64_t>& col_totals() const { return col_totals_; }
    std::int64_t grand_total() const { return grand_total_; }

    /// Fewer than two surviving rows or columns: no test is possible.
    bool degenerate() const { return n_rows() < 2 || n_cols() < 2; }

    double expected(std::size_t i, std::size_t j) const {
        return static_cast<double>(row_totals_[i]) * static_cast<double>(col_totals_[j]) /
               static_cast<double>(grand_total_);
    }

private:
    std::vector<std::vector<std::int64_t>> counts_;
    std::vector<std::int64_t> row_totals_;
    std::vector<std::int64_t> col_totals_;
    std::int64_t grand_total_ = 0;
};

/// Cross-tabulates integer feature codes in [0, n_levels) against 0/1 labels.
ContingencyTable contingency(std::span<const int> feature_codes, std::span<const int> labels,
                             int n_levels);

struct ChiSquareStatistic {
    double statistic = 0.0;
    int dof = 0;
};

/// Pearson statistic sum (observed - expected)^2 / expected with
/// dof = (rows - 1)(cols - 1). Throws StatError("degenerate table") when dof is 0.
ChiSquareStatistic chi_square_statistic(const ContingencyTable& table);

struct ChiSquareResult {
    std::string feature_name;
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool kept = false;
    /// The feature collapsed to a single level (or the labels to a single class).
    bool degenerate = false;
};

struct FeatureSelection {
    /// Kept features in their original column order.
    std::vector<std::string> kept;
    /// One result per feature, sorted by ascending p-value, ties by name.
    std::vector<ChiSquareResult> results;
};

/// Tests every encoded feature against the label. Numeric features are
/// discretized with the encoder's quantile edges, categorical features use
/// their codes. Features with p < alpha are kept; a degenerate feature is
/// reported with p = 1 and dropped. Throws SelectionError when nothing survives.
FeatureSelection select_features(const LabeledSet& train, const FittedEncoder& enc,
                                 double alpha = 0.05);

/// Result table as CSV: feature,statistic,dof,p_value,kept.
std::string selection_csv(const FeatureSelection& selection);

/// Horizontal bar chart of -log10(p) per feature with the alpha cut-off marked.
std::string selection_svg(const FeatureSelection& selection, double alpha);

}  // namespace stackline
