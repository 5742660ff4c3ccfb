#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackline/frame.hpp"

namespace stackline {

struct CategoricalSpec {
    std::string name;
    std::vector<std::string> categories;
    std::vector<double> weights_negative;
    std::vector<double> weights_positive;
};

struct SynthConfig {
    std::size_t n_rows = 2000;
    /// Fraction of positive ("Yes") rows; the count is floor(n_rows * balance).
    double class_balance = 0.5;
    /// Numeric features with class means at -1 / +1 and unit variance.
    std::size_t informative_features = 5;
    /// Standard normal features independent of the class.
    std::size_t noise_features = 5;
    std::vector<CategoricalSpec> categorical_specs = default_categoricals();
    /// Probability that any non-target cell is blanked.
    double missing_rate = 0.05;
    /// Per-column overrides of missing_rate.
    std::map<std::string, double> missing_overrides;
    /// Adds Name and City columns, the kind of identifiers the cleaner drops.
    bool identifier_columns = true;
    std::string target_column = "Depression";
    std::uint64_t seed = 42;

    static std::vector<CategoricalSpec> default_categoricals();
    void validate() const;

    static SynthConfig from_json(const nlohmann::json& doc);
};

/// Numeric column names: survey-like names first, then numbered ones.
std::vector<std::string> informative_feature_names(std::size_t count);

/// Seeded synthetic survey table with a Yes/No target column.
Frame generate(const SynthConfig& cfg);

}  // namespace stackline
