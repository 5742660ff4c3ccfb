#include "stackline/frame.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "stackline/rng.hpp"

namespace stackline {

const char* to_string(ColumnKind kind) {
    return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

Frame::Frame(std::vector<std::string> names, std::vector<ColumnKind> kinds,
             std::vector<std::vector<Cell>> rows)
    : names_(std::move(names)), kinds_(std::move(kinds)), rows_(std::move(rows)) {
    if (names_.size() != kinds_.size()) {
        throw SchemaError("column name and kind counts differ");
    }
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (!seen.insert(n).second) throw SchemaError("duplicate column name '" + n + "'");
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() != names_.size()) {
            throw SchemaError("row " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) +
                              " cells, expected " + std::to_string(names_.size()));
        }
        for (std::size_t c = 0; c < names_.size(); ++c) {
            const Cell& cell = rows_[r][c];
            if (cell.is_missing()) continue;
            const bool ok = kinds_[c] == ColumnKind::numeric ? cell.is_number() : cell.is_text();
            if (!ok) {
                throw SchemaError("cell (" + std::to_string(r) + ", '" + names_[c] +
                                  "') does not match column kind " + to_string(kinds_[c]));
            }
        }
    }
}

std::optional<std::size_t> Frame::find_column(const std::string& name) const {
    for (std::size_t c = 0; c < names_.size(); ++c) {
        if (names_[c] == name) return c;
    }
    return std::nullopt;
}

std::size_t Frame::column_index(const std::string& name) const {
    auto idx = find_column(name);
    if (!idx) throw SchemaError("no column named '" + name + "'");
    return *idx;
}

Frame Frame::take_rows(std::span<const std::size_t> idx) const {
    std::vector<std::vector<Cell>> rows;
    rows.reserve(idx.size());
    for (std::size_t i : idx) rows.push_back(rows_.at(i));
    Frame out;
    out.names_ = names_;
    out.kinds_ = kinds_;
    out.rows_ = std::move(rows);
    return out;
}

Frame Frame::drop_columns(std::span<const std::size_t> idx) const {
    std::set<std::size_t> drop(idx.begin(), idx.end());
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < names_.size(); ++c) {
        if (!drop.contains(c)) keep.push_back(c);
    }
    Frame out;
    for (std::size_t c : keep) {
        out.names_.push_back(names_[c]);
        out.kinds_.push_back(kinds_[c]);
    }
    out.rows_.reserve(rows_.size());
    for (const auto& row : rows_) {
        std::vector<Cell> cells;
        cells.reserve(keep.size());
        for (std::size_t c : keep) cells.push_back(row[c]);
        out.rows_.push_back(std::move(cells));
    }
    return out;
}

std::size_t Frame::missing_count(std::size_t col) const {
    std::size_t n = 0;
    for (const auto& row : rows_) n += row[col].is_missing() ? 1 : 0;
    return n;
}

std::size_t Frame::total_missing() const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < n_cols(); ++c) n += missing_count(c);
    return n;
}

LabeledSet::LabeledSet(Matrix x, std::vector<int> y, std::vector<std::string> names)
    : features(std::move(x)), labels(std::move(y)), feature_names(std::move(names)) {
    if (features.rows() != labels.size()) {
        throw ShapeError("feature rows (" + std::to_string(features.rows()) + ") != labels (" +
                         std::to_string(labels.size()) + ")");
    }
    if (feature_names.size() != features.cols()) {
        throw ShapeError("feature name count does not match feature columns");
    }
    for (int l : labels) {
        if (l != 0 && l != 1) throw SchemaError("labels must be 0 or 1");
    }
}

std::size_t LabeledSet::count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

LabeledSet LabeledSet::take_rows(std::span<const std::size_t> idx) const {
    std::vector<int> y;
    y.reserve(idx.size());
    for (std::size_t i : idx) y.push_back(labels.at(i));
    return LabeledSet(features.take_rows(idx), std::move(y), feature_names);
}

LabeledSet LabeledSet::select_features(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
        auto it = std::find(feature_names.begin(), feature_names.end(), n);
        if (it == feature_names.end()) throw SchemaError("no feature named '" + n + "'");
        idx.push_back(static_cast<std::size_t>(it - feature_names.begin()));
    }
    return LabeledSet(features.take_cols(idx), labels, names);
}

void SplitSpec::validate() const {
    for (double f : {train_frac, test_frac, val_frac}) {
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("split fractions must lie in [0,1]");
    }
    if (std::abs(train_frac + test_frac + val_frac - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
}

// ---------------------------------------------------------------------------
// CSV

namespace {

bool is_missing_token(const std::string& s) { return s.empty() || s == "NA"; }

std::optional<double> parse_number(const std::string& raw) {
    std::size_t b = raw.find_first_not_of(" \t");
    std::size_t e = raw.find_last_not_of(" \t");
    if (b == std::string::npos) return std::nullopt;
    const char* first = raw.data() + b;
    const char* last = raw.data() + e + 1;
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Reads one RFC-4180 record. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string field;
    bool quoted = false;
    bool any = false;
    char ch;
    while (in.get(ch)) {
        any = true;
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get(ch);
            break;
        } else {
            field.push_back(ch);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field");
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

bool needs_quotes(const std::string& s) {
    return s.find_first_of(",\"\r\n") != std::string::npos;
}

void write_field(std::ostream& out, const std::string& s) {
    if (!needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char ch : s) {
        if (ch == '"') out << '"';
        out << ch;
    }
    out << '"';
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

Frame parse_csv(std::istream& in, const CsvOptions& options) {
    std::vector<std::string> header;
    if (!read_record(in, header)) throw ParseError("CSV input is empty (no header row)");
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
    {
        std::set<std::string> seen;
        for (const auto& h : header) {
            if (!seen.insert(h).second) throw SchemaError("duplicate header '" + h + "'");
        }
    }
    std::vector<std::vector<std::string>> raw;
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (read_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty() && header.size() > 1) continue;  // blank line
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(line) + " has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(header.size()));
        }
        raw.push_back(fields);
    }

    const std::size_t n_cols = header.size();
    std::vector<ColumnKind> kinds(n_cols, ColumnKind::numeric);
    for (std::size_t c = 0; c < n_cols; ++c) {
        for (const auto& r : raw) {
            if (!is_missing_token(r[c]) && !parse_number(r[c])) {
                kinds[c] = ColumnKind::categorical;
                break;
            }
        }
        if (auto it = options.schema_hint.find(header[c]); it != options.schema_hint.end()) {
            kinds[c] = it->second;
        }
    }

    std::vector<std::vector<Cell>> rows;
    rows.reserve(raw.size());
    for (std::size_t r = 0; r < raw.size(); ++r) {
        std::vector<Cell> cells;
        cells.reserve(n_cols);
        for (std::size_t c = 0; c < n_cols; ++c) {
            const std::string& s = raw[r][c];
            if (is_missing_token(s)) {
                cells.push_back(Cell::missing());
            } else if (kinds[c] == ColumnKind::numeric) {
                auto v = parse_number(s);
                if (!v) {
                    throw ParseError("row " + std::to_string(r + 2) + ", column '" + header[c] +
                                     "': '" + s + "' is not a number");
                }
                cells.emplace_back(*v);
            } else {
                cells.emplace_back(s);
            }
        }
        rows.push_back(std::move(cells));
    }
    return Frame(std::move(header), std::move(kinds), std::move(rows));
}

Frame parse_csv_text(const std::string& text, const CsvOptions& options) {
    std::istringstream in(text);
    return parse_csv(in, options);
}

Frame read_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open CSV file '" + path.string() + "'");
    return parse_csv(in, options);
}

void write_csv(std::ostream& out, const Frame& frame) {
    const auto& names = frame.column_names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c) out << ',';
        write_field(out, names[c]);
    }
    out << '\n';
    for (const auto& row : frame.rows()) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            const Cell& cell = row[c];
            if (cell.is_number()) {
                out << format_number(cell.number());
            } else if (cell.is_text()) {
                write_field(out, cell.text());
            }
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Frame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError("cannot write '" + path.string() + "'");
    write_csv(out, frame);
}

std::string to_csv_text(const Frame& frame) {
    std::ostringstream out;
    write_csv(out, frame);
    return out.str();
}

Frame to_frame(const LabeledSet& set, const std::string& label_column) {
    std::vector<std::string> names = set.feature_names;
    names.push_back(label_column);
    std::vector<ColumnKind> kinds(names.size(), ColumnKind::numeric);
    std::vector<std::vector<Cell>> rows;
    rows.reserve(set.size());
    for (std::size_t r = 0; r < set.size(); ++r) {
        std::vector<Cell> cells;
        cells.reserve(names.size());
        for (double v : set.features.row(r)) cells.emplace_back(v);
        cells.emplace_back(static_cast<double>(set.labels[r]));
        rows.push_back(std::move(cells));
    }
    return Frame(std::move(names), std::move(kinds), std::move(rows));
}

LabeledSet from_frame(const Frame& frame, const std::string& label_column) {
    const std::size_t label_col = frame.column_index(label_column);
    std::vector<std::string> names;
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < frame.n_cols(); ++c) {
        if (c == label_col) continue;
        if (frame.column_kinds()[c] != ColumnKind::numeric) {
            throw SchemaError("feature column '" + frame.column_names()[c] + "' is not numeric");
        }
        names.push_back(frame.column_names()[c]);
        cols.push_back(c);
    }
    Matrix x(frame.n_rows(), cols.size());
    std::vector<int> y(frame.n_rows());
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const Cell& cell = frame.at(r, cols[j]);
            if (cell.is_missing()) {
                throw SchemaError("missing value in row " + std::to_string(r + 2) + ", column '" +
                                  names[j] + "'");
            }
            x(r, j) = cell.number();
        }
        const Cell& lab = frame.at(r, label_col);
        if (!lab.is_number() || (lab.number() != 0.0 && lab.number() != 1.0)) {
            throw SchemaError("label column '" + label_column + "' must hold 0/1 (row " +
                              std::to_string(r + 2) + ")");
        }
        y[r] = static_cast<int>(lab.number());
    }
    return LabeledSet(std::move(x), std::move(y), std::move(names));
}

// ---------------------------------------------------------------------------
// Splitting and balancing

SplitIndices split_indices(std::size_t n_rows, const SplitSpec& spec) {
    spec.validate();
    if (n_rows < 10) {
        throw PipelineError("split needs at least 10 rows, got " + std::to_string(n_rows));
    }
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    rng.shuffle(std::span(order));

    const auto n = static_cast<double>(n_rows);
    const auto n_test = static_cast<std::size_t>(std::floor(spec.test_frac * n));
    const auto n_val = static_cast<std::size_t>(std::floor(spec.val_frac * n));
    const std::size_t n_train = n_rows - n_test - n_val;

    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + n_train);
    out.test.assign(order.begin() + n_train, order.begin() + n_train + n_test);
    out.val.assign(order.begin() + n_train + n_test, order.end());
    return out;
}

std::tuple<Frame, Frame, Frame> split(const Frame& frame, const SplitSpec& spec) {
    auto idx = split_indices(frame.n_rows(), spec);
    return {frame.take_rows(idx.train), frame.take_rows(idx.test), frame.take_rows(idx.val)};
}

std::vector<std::size_t> balance_indices(std::span<const int> labels, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) {
        throw BalanceError("balancing needs both classes present (positives=" +
                           std::to_string(pos.size()) + ", negatives=" + std::to_string(neg.size()) +
                           ")");
    }
    Rng rng(seed);
    auto& majority = pos.size() > neg.size() ? pos : neg;
    const std::size_t keep = std::min(pos.size(), neg.size());
    rng.shuffle(std::span(majority));
    majority.resize(keep);

    std::vector<std::size_t> out;
    out.reserve(2 * keep);
    out.insert(out.end(), neg.begin(), neg.end());
    out.insert(out.end(), pos.begin(), pos.end());
    std::sort(out.begin(), out.end());
    rng.shuffle(std::span(out));
    return out;
}

LabeledSet balance(const LabeledSet& set, std::uint64_t seed) {
    return set.take_rows(balance_indices(set.labels, seed));
}

}  // namespace stackline
