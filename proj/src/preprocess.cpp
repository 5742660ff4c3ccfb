#include "stackline/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace stackline {

void PreprocessConfig::validate() const {
    if (!(null_col_threshold >= 0.0 && null_col_threshold <= 1.0)) {
        throw ConfigError("null_col_threshold must lie in [0,1]");
    }
    if (n_bins < 2) throw ConfigError("n_bins must be at least 2");
    if (target_column.empty()) throw ConfigError("target column name is empty");
}

Frame clean(const Frame& frame, const PreprocessConfig& cfg, CleanReport* report) {
    cfg.validate();
    CleanReport rep;
    rep.raw = {frame.n_rows(), frame.n_cols()};

    std::vector<std::size_t> named;
    for (const auto& name : cfg.drop_columns) {
        if (auto idx = frame.find_column(name)) {
            named.push_back(*idx);
            rep.dropped_columns.push_back(name);
        } else {
            rep.ignored_drop_columns.push_back(name);
        }
    }
    Frame out = frame.drop_columns(named);
    rep.after_drop_columns = {out.n_rows(), out.n_cols()};

    std::vector<std::size_t> sparse;
    if (out.n_rows() > 0) {
        for (std::size_t c = 0; c < out.n_cols(); ++c) {
            const double frac =
                static_cast<double>(out.missing_count(c)) / static_cast<double>(out.n_rows());
            if (frac > cfg.null_col_threshold) {
                sparse.push_back(c);
                rep.dropped_null_columns.emplace_back(out.column_names()[c], frac);
            }
        }
    }
    out = out.drop_columns(sparse);
    rep.after_null_columns = {out.n_rows(), out.n_cols()};

    std::vector<std::size_t> complete;
    for (std::size_t r = 0; r < out.n_rows(); ++r) {
        const auto& row = out.row(r);
        if (std::none_of(row.begin(), row.end(), [](const Cell& c) { return c.is_missing(); })) {
            complete.push_back(r);
        }
    }
    rep.dropped_rows = out.n_rows() - complete.size();
    out = out.take_rows(complete);
    rep.after_drop_rows = {out.n_rows(), out.n_cols()};

    if (report) *report = rep;
    if (out.n_rows() == 0 || out.n_cols() == 0) {
        throw PipelineError("cleaning left an empty frame (" + std::to_string(out.n_rows()) +
                            " rows, " + std::to_string(out.n_cols()) + " columns)");
    }
    return out;
}

// ---------------------------------------------------------------------------

double ColumnEncoding::encode(const Cell& cell) const {
    if (cell.is_missing()) throw SchemaError("missing value in column '" + name + "'");
    double v = 0.0;
    if (kind == ColumnKind::categorical) {
        v = code_of(cell.is_text() ? cell.text() : format_number(cell.number()));
    } else {
        if (!cell.is_number()) {
            throw SchemaError("column '" + name + "' expects numbers, found '" + cell.text() + "'");
        }
        v = cell.number();
    }
    return v;
}

int ColumnEncoding::code_of(const std::string& value) const {
    auto it = std::find(categories.begin(), categories.end(), value);
    return static_cast<int>(it - categories.begin());
}

int ColumnEncoding::bin_of(double value) const {
    return static_cast<int>(std::upper_bound(bin_edges.begin(), bin_edges.end(), value) -
                            bin_edges.begin());
}

int ColumnEncoding::n_levels() const {
    if (kind == ColumnKind::categorical) return static_cast<int>(categories.size()) + 1;
    return static_cast<int>(bin_edges.size()) + 1;
}

const ColumnEncoding* FittedEncoder::find(const std::string& name) const {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::vector<std::string> FittedEncoder::feature_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns) out.push_back(c.name);
    return out;
}

nlohmann::json FittedEncoder::to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns) {
        nlohmann::json j;
        j["name"] = c.name;
        j["kind"] = to_string(c.kind);
        if (c.kind == ColumnKind::categorical) {
            j["categories"] = c.categories;
        } else {
            nlohmann::json edges = nlohmann::json::array();
            for (double e : c.bin_edges) edges.push_back(format_number(e));
            j["bin_edges"] = edges;
            j["min"] = format_number(c.min);
            j["max"] = format_number(c.max);
        }
        cols.push_back(j);
    }
    nlohmann::json doc;
    doc["format"] = "stackline.encoder";
    doc["version"] = 1;
    doc["target_column"] = target_column;
    doc["positive_label"] = positive_label;
    doc["negative_label"] = negative_label;
    doc["numeric_target"] = numeric_target;
    doc["scaling"] = scaling == Scaling::minmax ? "minmax" : "none";
    doc["n_bins"] = n_bins;
    doc["columns"] = cols;
    doc["warnings"] = warnings;
    return doc;
}

FittedEncoder FittedEncoder::from_json(const nlohmann::json& doc) {
    if (doc.value("format", "") != "stackline.encoder") {
        throw SchemaError("not an encoder document");
    }
    auto num = [](const nlohmann::json& j) { return std::stod(j.get<std::string>()); };
    FittedEncoder enc;
    enc.target_column = doc.at("target_column").get<std::string>();
    enc.positive_label = doc.at("positive_label").get<std::string>();
    enc.negative_label = doc.at("negative_label").get<std::string>();
    enc.numeric_target = doc.at("numeric_target").get<bool>();
    enc.scaling = doc.at("scaling").get<std::string>() == "minmax" ? Scaling::minmax : Scaling::none;
    enc.n_bins = doc.at("n_bins").get<int>();
    enc.warnings = doc.value("warnings", std::vector<std::string>{});
    for (const auto& j : doc.at("columns")) {
        ColumnEncoding c;
        c.name = j.at("name").get<std::string>();
        if (j.at("kind").get<std::string>() == "categorical") {
            c.kind = ColumnKind::categorical;
            c.categories = j.at("categories").get<std::vector<std::string>>();
        } else {
            c.kind = ColumnKind::numeric;
            for (const auto& e : j.at("bin_edges")) c.bin_edges.push_back(num(e));
            c.min = num(j.at("min"));
            c.max = num(j.at("max"));
        }
        enc.columns.push_back(std::move(c));
    }
    return enc;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw StatError("quantile of empty data");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> quantile_edges(std::vector<double> values, int n_bins) {
    std::sort(values.begin(), values.end());
    std::vector<double> edges;
    if (values.empty()) return edges;
    for (int k = 1; k < n_bins; ++k) {
        const double q = quantile_sorted(values, static_cast<double>(k) / n_bins);
        if (edges.empty() || q > edges.back()) edges.push_back(q);
    }
    // An edge at or below the minimum puts nothing in bin 0.
    while (!edges.empty() && edges.front() <= values.front()) edges.erase(edges.begin());
    return edges;
}

namespace {

double scale_value(const ColumnEncoding& c, Scaling scaling, double v) {
    if (scaling != Scaling::minmax) return v;
    const double span = c.max - c.min;
    return span > 0.0 ? (v - c.min) / span : 0.0;
}

bool is_positive_numeric(double v) { return v == 1.0; }

}  // namespace

std::vector<int> raw_target_labels(const Frame& frame, const PreprocessConfig& cfg) {
    const std::size_t tc = frame.column_index(cfg.target_column);
    std::vector<int> y(frame.n_rows());
    std::set<std::string> seen;
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        const Cell& cell = frame.at(r, tc);
        if (cell.is_missing()) throw SchemaError("missing target in row " + std::to_string(r));
        if (cell.is_number()) {
            if (cell.number() != 0.0 && cell.number() != 1.0) {
                throw SchemaError("numeric target '" + cfg.target_column + "' must be 0/1");
            }
            y[r] = is_positive_numeric(cell.number()) ? 1 : 0;
        } else {
            seen.insert(cell.text());
            y[r] = cell.text() == cfg.positive_label ? 1 : 0;
        }
    }
    if (seen.size() > 2) {
        throw SchemaError("target '" + cfg.target_column + "' is not binary (" +
                          std::to_string(seen.size()) + " distinct values)");
    }
    return y;
}

FittedEncoder fit_encoder(const Frame& train, const PreprocessConfig& cfg) {
    cfg.validate();
    if (train.total_missing() != 0) {
        throw PipelineError("fit_encoder requires a clean frame (no missing cells)");
    }
    FittedEncoder enc;
    enc.target_column = cfg.target_column;
    enc.positive_label = cfg.positive_label;
    enc.scaling = cfg.scaling;
    enc.n_bins = cfg.n_bins;

    const std::size_t tc = train.column_index(cfg.target_column);
    if (train.column_kinds()[tc] == ColumnKind::numeric) {
        enc.numeric_target = true;
        std::set<double> values;
        for (const auto& row : train.rows()) values.insert(row[tc].number());
        if (values != std::set<double>{0.0, 1.0}) {
            throw SchemaError("numeric target '" + cfg.target_column + "' must contain exactly 0 and 1");
        }
        enc.positive_label = "1";
        enc.negative_label = "0";
    } else {
        std::vector<std::string> values;
        for (const auto& row : train.rows()) {
            const auto& v = row[tc].text();
            if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
        }
        const bool has_positive =
            std::find(values.begin(), values.end(), cfg.positive_label) != values.end();
        if (values.size() != 2 || !has_positive) {
            throw SchemaError("target '" + cfg.target_column + "' must hold exactly two values, one of them '" +
                              cfg.positive_label + "'");
        }
        enc.negative_label = values[0] == cfg.positive_label ? values[1] : values[0];
    }

    for (std::size_t c = 0; c < train.n_cols(); ++c) {
        if (c == tc) continue;
        ColumnEncoding col;
        col.name = train.column_names()[c];
        col.kind = train.column_kinds()[c];
        if (col.kind == ColumnKind::categorical) {
            if (auto it = cfg.ordinal_maps.find(col.name); it != cfg.ordinal_maps.end()) {
                col.categories = it->second;
            }
            for (const auto& row : train.rows()) {
                const auto& v = row[c].text();
                if (std::find(col.categories.begin(), col.categories.end(), v) == col.categories.end()) {
                    col.categories.push_back(v);
                }
            }
            std::set<std::string> distinct;
            for (const auto& row : train.rows()) distinct.insert(row[c].text());
            if (distinct.size() <= 1) {
                enc.warnings.push_back("column '" + col.name +
                                       "' has a single category in training data; encoded as constant");
            }
        } else {
            std::vector<double> values;
            values.reserve(train.n_rows());
            for (const auto& row : train.rows()) values.push_back(row[c].number());
            if (!values.empty()) {
                col.min = *std::min_element(values.begin(), values.end());
                col.max = *std::max_element(values.begin(), values.end());
            }
            for (double& v : values) v = scale_value(col, cfg.scaling, v);
            col.bin_edges = quantile_edges(std::move(values), cfg.n_bins);
            if (col.bin_edges.empty()) {
                enc.warnings.push_back("column '" + col.name + "' is constant in training data");
            }
        }
        enc.columns.push_back(std::move(col));
    }
    return enc;
}

std::vector<int> encode_target(const Frame& frame, const FittedEncoder& enc) {
    const std::size_t tc = frame.column_index(enc.target_column);
    std::vector<int> y(frame.n_rows());
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        const Cell& cell = frame.at(r, tc);
        std::string v;
        if (cell.is_missing()) {
            throw SchemaError("missing target in row " + std::to_string(r));
        } else if (cell.is_number()) {
            v = format_number(cell.number());
        } else {
            v = cell.text();
        }
        if (v == enc.positive_label) {
            y[r] = 1;
        } else if (v == enc.negative_label) {
            y[r] = 0;
        } else {
            throw SchemaError("target value '" + v + "' is neither '" + enc.positive_label + "' nor '" +
                              enc.negative_label + "'");
        }
    }
    return y;
}

Matrix transform_features(const Frame& frame, const FittedEncoder& enc) {
    std::vector<std::size_t> src;
    for (const auto& col : enc.columns) src.push_back(frame.column_index(col.name));
    Matrix x(frame.n_rows(), enc.columns.size());
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        for (std::size_t j = 0; j < enc.columns.size(); ++j) {
            const auto& col = enc.columns[j];
            double v = col.encode(frame.at(r, src[j]));
            if (col.kind == ColumnKind::numeric) v = scale_value(col, enc.scaling, v);
            x(r, j) = v;
        }
    }
    return x;
}

LabeledSet transform(const Frame& frame, const FittedEncoder& enc) {
    return LabeledSet(transform_features(frame, enc), encode_target(frame, enc), enc.feature_names());
}

LabeledSet transform(const Frame& frame, const FittedEncoder& enc, const std::string& target_column) {
    if (target_column != enc.target_column) {
        throw SchemaError("encoder was fitted for target '" + enc.target_column + "', not '" +
                          target_column + "'");
    }
    return transform(frame, enc);
}

}  // namespace stackline
