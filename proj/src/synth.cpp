#include "stackline/synth.hpp"

#include <cmath>
#include <numeric>

#include "stackline/rng.hpp"

namespace stackline {

std::vector<CategoricalSpec> SynthConfig::default_categoricals() {
    return {
        {"Gender", {"Male", "Female"}, {0.5, 0.5}, {0.5, 0.5}},
        {"Sleep Duration",
         {"Less than 5 hours", "5-6 hours", "7-8 hours", "More than 8 hours"},
         {0.15, 0.25, 0.35, 0.25},
         {0.35, 0.30, 0.20, 0.15}},
        {"Dietary Habits", {"Unhealthy", "Moderate", "Healthy"}, {0.2, 0.35, 0.45}, {0.45, 0.35, 0.2}},
    };
}

void SynthConfig::validate() const {
    if (n_rows < 2) throw ConfigError("synth: n_rows must be at least 2");
    if (!(class_balance > 0.0 && class_balance < 1.0)) {
        throw ConfigError("synth: class_balance must lie strictly between 0 and 1");
    }
    const auto n_pos = static_cast<std::size_t>(std::floor(static_cast<double>(n_rows) * class_balance));
    if (n_pos == 0 || n_pos == n_rows) throw ConfigError("synth: class_balance leaves one class empty");
    if (!(missing_rate >= 0.0 && missing_rate <= 1.0)) throw ConfigError("synth: missing_rate must lie in [0,1]");
    for (const auto& [name, rate] : missing_overrides) {
        if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("synth: missing rate for '" + name + "' outside [0,1]");
    }
    for (const auto& c : categorical_specs) {
        if (c.categories.empty()) throw ConfigError("synth: categorical '" + c.name + "' has no categories");
        for (const auto* w : {&c.weights_negative, &c.weights_positive}) {
            if (w->size() != c.categories.size()) {
                throw ConfigError("synth: weights for '" + c.name + "' do not match its categories");
            }
            double total = 0.0;
            for (double v : *w) {
                if (!(v >= 0.0)) throw ConfigError("synth: negative weight in '" + c.name + "'");
                total += v;
            }
            if (!(total > 0.0)) throw ConfigError("synth: weights for '" + c.name + "' sum to zero");
        }
    }
}

SynthConfig SynthConfig::from_json(const nlohmann::json& doc) {
    SynthConfig cfg;
    try {
        cfg.n_rows = doc.value("n_rows", cfg.n_rows);
        cfg.class_balance = doc.value("class_balance", cfg.class_balance);
        cfg.informative_features = doc.value("informative_features", cfg.informative_features);
        cfg.noise_features = doc.value("noise_features", cfg.noise_features);
        cfg.missing_rate = doc.value("missing_rate", cfg.missing_rate);
        cfg.identifier_columns = doc.value("identifier_columns", cfg.identifier_columns);
        cfg.target_column = doc.value("target_column", cfg.target_column);
        cfg.seed = doc.value("seed", cfg.seed);
        if (doc.contains("missing_overrides")) {
            cfg.missing_overrides = doc.at("missing_overrides").get<std::map<std::string, double>>();
        }
        if (doc.contains("categorical_specs")) {
            cfg.categorical_specs.clear();
            for (const auto& c : doc.at("categorical_specs")) {
                cfg.categorical_specs.push_back({c.at("name").get<std::string>(),
                                                 c.at("categories").get<std::vector<std::string>>(),
                                                 c.at("weights_negative").get<std::vector<double>>(),
                                                 c.at("weights_positive").get<std::vector<double>>()});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("synth config: ") + e.what());
    }
    return cfg;
}

std::vector<std::string> informative_feature_names(std::size_t count) {
    static const char* base[] = {"Age", "Work Pressure", "Job Satisfaction", "Financial Stress",
                                 "Work Hours"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(i < std::size(base) ? base[i] : "Signal " + std::to_string(i + 1));
    }
    return out;
}

namespace {

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::size_t sample_category(Rng& rng, const std::vector<double>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return k;
    }
    return weights.size() - 1;
}

const char* kCities[] = {"Kolkata", "Pune", "Delhi", "Mumbai", "Chennai", "Jaipur"};

}  // namespace

Frame generate(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const std::size_t n = cfg.n_rows;
    const auto n_pos = static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.class_balance));
    std::vector<int> labels(n, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
    rng.shuffle(std::span(labels));

    std::vector<std::string> names;
    std::vector<ColumnKind> kinds;
    if (cfg.identifier_columns) {
        names.insert(names.end(), {"Name", "City"});
        kinds.insert(kinds.end(), {ColumnKind::categorical, ColumnKind::categorical});
    }
    const auto informative = informative_feature_names(cfg.informative_features);
    for (const auto& c : cfg.categorical_specs) {
        names.push_back(c.name);
        kinds.push_back(ColumnKind::categorical);
    }
    for (const auto& name : informative) {
        names.push_back(name);
        kinds.push_back(ColumnKind::numeric);
    }
    for (std::size_t k = 0; k < cfg.noise_features; ++k) {
        names.push_back("Noise " + std::to_string(k + 1));
        kinds.push_back(ColumnKind::numeric);
    }
    names.push_back(cfg.target_column);
    kinds.push_back(ColumnKind::categorical);

    std::vector<double> missing(names.size() - 1, cfg.missing_rate);
    for (std::size_t c = 0; c + 1 < names.size(); ++c) {
        if (auto it = cfg.missing_overrides.find(names[c]); it != cfg.missing_overrides.end()) {
            missing[c] = it->second;
        }
    }

    std::vector<std::vector<Cell>> rows;
    rows.reserve(n);
    char id[32];
    for (std::size_t r = 0; r < n; ++r) {
        const int y = labels[r];
        std::vector<Cell> row;
        row.reserve(names.size());
        if (cfg.identifier_columns) {
            std::snprintf(id, sizeof id, "P%05zu", r + 1);
            row.emplace_back(std::string(id));
            row.emplace_back(std::string(kCities[rng.below(std::size(kCities))]));
        }
        for (const auto& c : cfg.categorical_specs) {
            const auto& w = y == 1 ? c.weights_positive : c.weights_negative;
            row.emplace_back(c.categories[sample_category(rng, w)]);
        }
        const double mean = y == 1 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < informative.size(); ++k) row.emplace_back(round3(mean + rng.normal()));
        for (std::size_t k = 0; k < cfg.noise_features; ++k) row.emplace_back(round3(rng.normal()));
        for (std::size_t c = 0; c < row.size(); ++c) {
            // Always draw so the stream does not depend on the rates.
            const double u = rng.uniform();
            if (u < missing[c]) row[c] = Cell::missing();
        }
        row.emplace_back(std::string(y == 1 ? "Yes" : "No"));
        rows.push_back(std::move(row));
    }
    return Frame(std::move(names), std::move(kinds), std::move(rows));
}

}  // namespace stackline
