#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackline/frame.hpp"

namespace stackline {

enum class Scaling { none, minmax };

struct PreprocessConfig {
    std::string target_column = "Depression";
    /// Target value that maps to label 1.
    std::string positive_label = "Yes";
    /// Name-based drop list; names absent from the input are ignored and reported.
    std::vector<std::string> drop_columns = {"Name",       "Type",    "City",
                                             "Working Professional or Student",
                                             "Profession", "Degree"};
    /// Columns whose missing fraction exceeds this are dropped.
    double null_col_threshold = 0.60;
    /// Explicit category order per column; unlisted columns use first-appearance order.
    std::map<std::string, std::vector<std::string>> ordinal_maps = {
        {"Sleep Duration", {"Less than 5 hours", "5-6 hours", "7-8 hours", "More than 8 hours"}},
        {"Dietary Habits", {"Unhealthy", "Moderate", "Healthy"}},
    };
    int n_bins = 5;
    Scaling scaling = Scaling::none;

    void validate() const;
};

/// Audit trail of what clean() removed.
struct CleanReport {
    struct Shape {
        std::size_t rows = 0;
        std::size_t cols = 0;
    };
    Shape raw, after_drop_columns, after_null_columns, after_drop_rows;
    std::vector<std::string> dropped_columns;
    std::vector<std::string> ignored_drop_columns;
    std::vector<std::pair<std::string, double>> dropped_null_columns;  // name, missing fraction
    std::size_t dropped_rows = 0;
};

/// Drops configured columns, then columns with missing fraction above the
/// threshold, then every row that still holds a missing cell.
/// Throws PipelineError when nothing is left.
Frame clean(const Frame& frame, const PreprocessConfig& cfg, CleanReport* report = nullptr);

/// Encoding learned for one feature column.
struct ColumnEncoding {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    /// Categorical: code i is categories[i]. Unseen values map to categories.size().
    std::vector<std::string> categories;
    /// Interior quantile edges (strictly increasing) over the transformed values.
    std::vector<double> bin_edges;
    /// Min-max scaling bounds, used only when scaling is enabled.
    double min = 0.0;
    double max = 0.0;

    double encode(const Cell& cell) const;
    int code_of(const std::string& value) const;
    /// Bin index in [0, bin_edges.size()] for a transformed numeric value.
    int bin_of(double value) const;
    /// Number of distinct discrete values the column can take for chi-square.
    int n_levels() const;
};

/// Encoders fitted on the training split only.
struct FittedEncoder {
    std::vector<ColumnEncoding> columns;
    std::string target_column;
    std::string positive_label;
    std::string negative_label;
    bool numeric_target = false;
    Scaling scaling = Scaling::none;
    int n_bins = 5;
    std::vector<std::string> warnings;

    const ColumnEncoding* find(const std::string& name) const;
    std::vector<std::string> feature_names() const;

    nlohmann::json to_json() const;
    static FittedEncoder from_json(const nlohmann::json& doc);
};

/// Linear-interpolation sample quantile of sorted data (p in [0,1]).
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Strictly increasing interior edges at the k/n_bins quantiles, ties collapsed.
std::vector<double> quantile_edges(std::vector<double> values, int n_bins);

FittedEncoder fit_encoder(const Frame& train, const PreprocessConfig& cfg);

/// Maps the target column to {0,1} using the encoder's positive class.
std::vector<int> encode_target(const Frame& frame, const FittedEncoder& enc);

/// Feature matrix only (target column not required).
Matrix transform_features(const Frame& frame, const FittedEncoder& enc);

LabeledSet transform(const Frame& frame, const FittedEncoder& enc);
LabeledSet transform(const Frame& frame, const FittedEncoder& enc, const std::string& target_column);

/// Target labels straight from a raw frame, before any encoder exists.
std::vector<int> raw_target_labels(const Frame& frame, const PreprocessConfig& cfg);

}  // namespace stackline
