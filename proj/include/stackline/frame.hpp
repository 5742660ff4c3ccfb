#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "stackline/matrix.hpp"

namespace stackline {

enum class ColumnKind { numeric, categorical };

const char* to_string(ColumnKind kind);

/// One table cell: a number, a text value, or missing.
class Cell {
public:
    Cell() = default;
    Cell(double v) : value_(v) {}
    Cell(std::string v) : value_(std::move(v)) {}
    Cell(const char* v) : value_(std::string(v)) {}

    static Cell missing() { return {}; }

    bool is_missing() const { return std::holds_alternative<std::monostate>(value_); }
    bool is_number() const { return std::holds_alternative<double>(value_); }
    bool is_text() const { return std::holds_alternative<std::string>(value_); }

    double number() const { return std::get<double>(value_); }
    const std::string& text() const { return std::get<std::string>(value_); }

    bool operator==(const Cell&) const = default;
    auto operator<=>(const Cell&) const = default;

private:
    std::variant<std::monostate, double, std::string> value_;
};

/// Immutable-by-convention tabular dataset with named, typed columns.
class Frame {
public:
    Frame() = default;

    /// Validates the invariants: unique names, one kind per column, rectangular
    /// rows, and cell tags that agree with their column kind.
    Frame(std::vector<std::string> names, std::vector<ColumnKind> kinds,
          std::vector<std::vector<Cell>> rows);

    std::size_t n_rows() const { return rows_.size(); }
    std::size_t n_cols() const { return names_.size(); }

    const std::vector<std::string>& column_names() const { return names_; }
    const std::vector<ColumnKind>& column_kinds() const { return kinds_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    const std::vector<Cell>& row(std::size_t r) const { return rows_[r]; }
    const Cell& at(std::size_t r, std::size_t c) const { return rows_[r][c]; }

    std::optional<std::size_t> find_column(const std::string& name) const;
    /// Throws SchemaError when the column is absent.
    std::size_t column_index(const std::string& name) const;

    Frame take_rows(std::span<const std::size_t> idx) const;
    Frame drop_columns(std::span<const std::size_t> idx) const;

    std::size_t missing_count(std::size_t col) const;
    std::size_t total_missing() const;

    bool operator==(const Frame&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<ColumnKind> kinds_;
    std::vector<std::vector<Cell>> rows_;
};

/// Model-ready binary classification data.
struct LabeledSet {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    LabeledSet() = default;
    LabeledSet(Matrix x, std::vector<int> y, std::vector<std::string> names);

    std::size_t size() const { return labels.size(); }
    std::size_t dims() const { return features.cols(); }
    std::size_t count(int label) const;

    LabeledSet take_rows(std::span<const std::size_t> idx) const;
    LabeledSet select_features(const std::vector<std::string>& names) const;
};

/// Train/test/validation proportions.
struct SplitSpec {
    double train_frac = 0.70;
    double test_frac = 0.20;
    double val_frac = 0.10;
    std::uint64_t seed = 42;

    void validate() const;
};

struct CsvOptions {
    /// Forces a column kind; applied after inference.
    std::map<std::string, ColumnKind> schema_hint;
};

Frame read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Frame parse_csv(std::istream& in, const CsvOptions& options = {});
Frame parse_csv_text(const std::string& text, const CsvOptions& options = {});

/// Numbers use the shortest representation that round-trips; missing cells
/// are written as empty fields; fields are quoted only when needed.
void write_csv(std::ostream& out, const Frame& frame);
void write_csv(const std::filesystem::path& path, const Frame& frame);
std::string to_csv_text(const Frame& frame);

/// Shortest round-trip decimal text for a double.
std::string format_number(double v);

/// Writes a LabeledSet as CSV: feature columns then the label column.
Frame to_frame(const LabeledSet& set, const std::string& label_column);
/// Inverse of to_frame; every feature column must be numeric and the label
/// column must contain only 0/1.
LabeledSet from_frame(const Frame& frame, const std::string& label_column);

struct SplitIndices {
    std::vector<std::size_t> train, test, val;
};

/// Seeded shuffle then partition. Test and validation sizes are
/// floor(frac * n); the remainder goes to train.
SplitIndices split_indices(std::size_t n_rows, const SplitSpec& spec);
std::tuple<Frame, Frame, Frame> split(const Frame& frame, const SplitSpec& spec);

/// Row indices of a class-balanced subsample: the majority class is
/// undersampled without replacement to the minority count, then the kept
/// rows are shuffled.
std::vector<std::size_t> balance_indices(std::span<const int> labels, std::uint64_t seed);
LabeledSet balance(const LabeledSet& set, std::uint64_t seed);

}  // namespace stackline
