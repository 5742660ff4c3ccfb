#include "stackline/pipeline.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace stackline {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Files

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw PipelineError("failed writing '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PipelineError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string file_digest(const fs::path& path) {
    const std::string bytes = read_text(path);
    unsigned char hash[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), hash, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", hash[i]);
        hex += buf;
    }
    return hex;
}

namespace {

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json(const fs::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Stage bookkeeping

class StageRunner {
public:
    StageRunner(const PipelineConfig& cfg, std::string command) : root_(cfg.output_dir) {
        manifest_.command = std::move(command);
        manifest_.config_digest = cfg.digest();
    }

    template <typename F>
    auto stage(const std::string& name, F&& body) {
        const auto start = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(body())>) {
                body();
                finish(name, start);
            } else {
                auto result = body();
                finish(name, start);
                return result;
            }
        } catch (const Error& e) {
            fail(name, e.what());
            if (dynamic_cast<const ConfigError*>(&e)) {
                throw ConfigError("stage '" + name + "': " + e.what());
            }
            throw PipelineError("stage '" + name + "' failed: " + e.what());
        } catch (const std::exception& e) {
            fail(name, e.what());
            throw PipelineError("stage '" + name + "' failed: " + e.what());
        }
    }

    void artifact(const fs::path& p) { manifest_.artifacts.push_back(p); }
    nlohmann::json& counts() { return manifest_.counts; }

    RunManifest done() {
        manifest_.write(root_);
        return manifest_;
    }

private:
    void finish(const std::string& name, std::chrono::steady_clock::time_point start) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        manifest_.timings.emplace_back(name, dt.count());
        manifest_.stages_completed.push_back(name);
    }

    void fail(const std::string& name, const std::string& what) {
        manifest_.status = "failed";
        manifest_.failed_stage = name;
        manifest_.error = what;
        try {
            manifest_.write(root_);
        } catch (...) {
            // The original error is more useful than a manifest write failure.
        }
    }

    fs::path root_;
    RunManifest manifest_;
};

void require_artifact(const fs::path& path, const std::string& producer) {
    if (!fs::exists(path)) {
        throw ConfigError("missing '" + path.string() + "'; run `stackline " + producer + "` first");
    }
}

LabeledSet load_split(const PipelineConfig& cfg, const std::string& split) {
    if (split != "train" && split != "test" && split != "val") {
        throw ConfigError("unknown split '" + split + "' (expected train, test or val)");
    }
    const fs::path path = cfg.output_dir / (split + ".csv");
    require_artifact(path, "preprocess");
    return from_frame(read_csv(path), cfg.preprocess.target_column);
}

std::vector<std::string> load_selected(const PipelineConfig& cfg) {
    const fs::path path = cfg.output_dir / "selected_features.json";
    require_artifact(path, "select");
    return read_json(path).at("kept").get<std::vector<std::string>>();
}

StackingConfig stacking_with_params(const PipelineConfig& cfg) {
    StackingConfig sc = cfg.stacking;
    for (auto& spec : sc.base_learners) spec.params = cfg.params_for(spec.kind);
    return sc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

nlohmann::json PipelineConfig::default_document() {
    const PreprocessConfig pp;
    const StackingConfig sc;
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& b : sc.base_learners) bases.push_back(b.kind);
    return {
        {"input", ""},
        {"output_dir", "stackline_out"},
        {"seed", 42},
        {"target", pp.target_column},
        {"positive_label", pp.positive_label},
        {"preprocess",
         {{"drop_columns", pp.drop_columns},
          {"null_col_threshold", pp.null_col_threshold},
          {"ordinal_maps", pp.ordinal_maps},
          {"n_bins", pp.n_bins},
          {"scaling", "none"}}},
        {"split", {{"train", 0.7}, {"test", 0.2}, {"val", 0.1}}},
        {"alpha", 0.05},
        {"stacking",
         {{"base_learners", bases},
          {"n_folds", sc.n_folds},
          {"meta", {{"learning_rate", sc.meta.learning_rate}, {"epochs", sc.meta.epochs}}}}},
        {"learners",
         {{"knn", {{"k", 5}}},
          {"svm", {{"lambda", 0.01}, {"epochs", 100}}},
          {"mlp", {{"hidden_units", 16}, {"learning_rate", 0.05}, {"epochs", 500}}},
          {"adaboost", {{"rounds", 50}}},
          {"logreg", {{"learning_rate", 0.1}, {"epochs", 1000}}},
          {"nb", {{"var_floor", 1e-9}}},
          {"gboost", {{"rounds", 100}, {"shrinkage", 0.1}}}}},
        {"synth", nlohmann::json::object()},
    };
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' is not of the form path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        value = text;
    }
    nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("override path '" + path + "' has an empty segment");
        if (!node->is_object()) throw ConfigError("override path '" + path + "' crosses a non-object");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = nlohmann::json::object();
        start = dot + 1;
    }
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc, const std::vector<std::string>& overrides) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    nlohmann::json merged = default_document();
    const nlohmann::json defaults = merged;
    for (const auto& [key, value] : doc.items()) {
        if (!defaults.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    // Lists and maps given by the user replace the defaults wholesale.
    for (const auto& [key, value] : doc.items()) {
        if (value.is_object() && merged[key].is_object() && key != "synth") {
            for (const auto& [k2, v2] : value.items()) merged[key][k2] = v2;
        } else {
            merged[key] = value;
        }
    }
    for (const auto& o : overrides) apply_override(merged, o);

    PipelineConfig cfg;
    cfg.document = merged;
    try {
        cfg.input = merged.at("input").get<std::string>();
        cfg.output_dir = merged.at("output_dir").get<std::string>();
        cfg.seed = merged.at("seed").get<std::uint64_t>();

        auto& pp = cfg.preprocess;
        pp.target_column = merged.at("target").get<std::string>();
        pp.positive_label = merged.at("positive_label").get<std::string>();
        const auto& p = merged.at("preprocess");
        for (const auto& [key, value] : p.items()) {
            if (!defaults.at("preprocess").contains(key)) throw ConfigError("unknown key 'preprocess." + key + "'");
        }
        pp.drop_columns = p.at("drop_columns").get<std::vector<std::string>>();
        pp.null_col_threshold = p.at("null_col_threshold").get<double>();
        pp.ordinal_maps = p.at("ordinal_maps").get<std::map<std::string, std::vector<std::string>>>();
        pp.n_bins = p.at("n_bins").get<int>();
        const auto scaling = p.at("scaling").get<std::string>();
        if (scaling != "none" && scaling != "minmax") {
            throw ConfigError("preprocess.scaling must be 'none' or 'minmax'");
        }
        pp.scaling = scaling == "minmax" ? Scaling::minmax : Scaling::none;
        pp.validate();

        const auto& s = merged.at("split");
        cfg.split.train_frac = s.at("train").get<double>();
        cfg.split.test_frac = s.at("test").get<double>();
        cfg.split.val_frac = s.at("val").get<double>();
        cfg.split.seed = cfg.seed;
        cfg.split.validate();

        cfg.alpha = merged.at("alpha").get<double>();
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");

        const auto& st = merged.at("stacking");
        cfg.stacking.base_learners.clear();
        for (const auto& b : st.at("base_learners")) {
            cfg.stacking.base_learners.push_back({b.get<std::string>(), nlohmann::json::object()});
        }
        if (cfg.stacking.base_learners.size() < 2) throw ConfigError("stacking needs at least two base learners");
        cfg.stacking.n_folds = st.at("n_folds").get<int>();
        if (cfg.stacking.n_folds < 2) throw ConfigError("stacking.n_folds must be at least 2");
        cfg.stacking.meta.learning_rate = st.at("meta").at("learning_rate").get<double>();
        cfg.stacking.meta.epochs = st.at("meta").at("epochs").get<int>();
        cfg.stacking.seed = cfg.seed;

        for (const auto& [kind, params] : merged.at("learners").items()) {
            cfg.learner_params[kind] = params;
            make_learner(kind, params);  // validates tag and values
        }
        for (const auto& b : cfg.stacking.base_learners) make_learner(b.kind, cfg.params_for(b.kind));

        cfg.synth = SynthConfig::from_json(merged.at("synth"));
        cfg.synth.target_column = pp.target_column;
        if (!merged.at("synth").contains("seed")) cfg.synth.seed = cfg.seed;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path, const std::vector<std::string>& overrides) {
    if (!fs::exists(path)) throw ConfigError("config file '" + path.string() + "' does not exist");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return from_json(doc, overrides);
}

nlohmann::json PipelineConfig::params_for(const std::string& kind) const {
    auto it = learner_params.find(kind);
    return it == learner_params.end() ? nlohmann::json::object() : it->second;
}

// ---------------------------------------------------------------------------
// Manifest

nlohmann::json RunManifest::to_json(const fs::path& root) const {
    nlohmann::json doc;
    doc["format"] = "stackline.manifest";
    doc["version"] = 1;
    doc["command"] = command;
    doc["config_digest"] = config_digest;
    doc["status"] = status;
    if (status != "ok") {
        doc["failed_stage"] = failed_stage;
        doc["error"] = error;
    }
    doc["stages_completed"] = stages_completed;
    doc["counts"] = counts;
    nlohmann::json arts = nlohmann::json::array();
    for (const auto& a : artifacts) {
        const fs::path full = root / a;
        arts.push_back({{"path", a.generic_string()},
                        {"sha256", fs::exists(full) ? file_digest(full) : std::string()}});
    }
    doc["artifacts"] = arts;
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [name, seconds] : timings) t[name] = seconds;
    doc["timings"] = t;
    return doc;
}

void RunManifest::write(const fs::path& root) const {
    fs::create_directories(root);
    const fs::path final_path = root / ("manifest_" + command + ".json");
    const fs::path tmp = root / ("manifest_" + command + ".json.tmp");
    write_json(tmp, to_json(root));
    fs::rename(tmp, final_path);
}

// ---------------------------------------------------------------------------
// Commands

namespace {

nlohmann::json shape_json(const CleanReport::Shape& s) { return {{"rows", s.rows}, {"cols", s.cols}}; }

}  // namespace

PreprocessOutcome run_preprocess(const PipelineConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("no input CSV configured");
    if (!fs::is_regular_file(cfg.input)) {
        throw ConfigError("input CSV '" + cfg.input.string() + "' does not exist");
    }
    fs::create_directories(cfg.output_dir);
    StageRunner run(cfg, "preprocess");
    PreprocessOutcome out;

    const Frame raw = run.stage("read", [&] { return read_csv(cfg.input); });
    const Frame cleaned = run.stage("clean", [&] { return clean(raw, cfg.preprocess, &out.clean); });
    auto& counts = run.counts();
    counts["raw"] = shape_json(out.clean.raw);
    counts["after_drop_columns"] = shape_json(out.clean.after_drop_columns);
    counts["after_null_columns"] = shape_json(out.clean.after_null_columns);
    counts["after_drop_rows"] = shape_json(out.clean.after_drop_rows);
    counts["dropped_columns"] = out.clean.dropped_columns;
    counts["ignored_drop_columns"] = out.clean.ignored_drop_columns;
    nlohmann::json sparse = nlohmann::json::array();
    for (const auto& [name, frac] : out.clean.dropped_null_columns) {
        sparse.push_back({{"column", name}, {"missing_fraction", frac}});
    }
    counts["dropped_null_columns"] = sparse;
    counts["dropped_rows"] = out.clean.dropped_rows;

    auto [train_raw, test_raw, val_raw] = run.stage("split", [&] { return split(cleaned, cfg.split); });
    out.train_rows_before_balance = train_raw.n_rows();
    const Frame train = run.stage("balance", [&] {
        const auto labels = raw_target_labels(train_raw, cfg.preprocess);
        return train_raw.take_rows(balance_indices(labels, cfg.seed + 1));
    });
    out.encoder = run.stage("fit_encoder", [&] { return fit_encoder(train, cfg.preprocess); });
    run.stage("transform", [&] {
        const std::string& target = cfg.preprocess.target_column;
        const std::pair<const char*, const Frame*> splits[] = {
            {"train", &train}, {"test", &test_raw}, {"val", &val_raw}};
        for (const auto& [name, frame] : splits) {
            const LabeledSet set = transform(*frame, out.encoder);
            const fs::path rel = std::string(name) + ".csv";
            write_csv(cfg.output_dir / rel, to_frame(set, target));
            run.artifact(rel);
        }
        write_json(cfg.output_dir / "encoder.json", out.encoder.to_json());
        run.artifact("encoder.json");
    });
    out.train_rows = train.n_rows();
    out.test_rows = test_raw.n_rows();
    out.val_rows = val_raw.n_rows();
    counts["split"] = {{"train", out.train_rows_before_balance}, {"test", out.test_rows}, {"val", out.val_rows}};
    counts["train_after_balance"] = out.train_rows;
    counts["encoder_warnings"] = out.encoder.warnings;
    out.manifest = run.done();
    return out;
}

SelectOutcome run_select(const PipelineConfig& cfg) {
    const LabeledSet train = load_split(cfg, "train");
    require_artifact(cfg.output_dir / "encoder.json", "preprocess");
    StageRunner run(cfg, "select");
    SelectOutcome out;
    const FittedEncoder enc = FittedEncoder::from_json(read_json(cfg.output_dir / "encoder.json"));
    out.selection = run.stage("chi_square", [&] { return select_features(train, enc, cfg.alpha); });
    run.stage("write", [&] {
        write_text(cfg.output_dir / "chi2.csv", selection_csv(out.selection));
        write_text(cfg.output_dir / "chi2.svg", selection_svg(out.selection, cfg.alpha));
        write_json(cfg.output_dir / "selected_features.json",
                   {{"alpha", cfg.alpha}, {"kept", out.selection.kept}});
    });
    for (const char* a : {"chi2.csv", "chi2.svg", "selected_features.json"}) run.artifact(a);
    run.counts()["features_tested"] = out.selection.results.size();
    run.counts()["features_kept"] = out.selection.kept.size();
    out.manifest = run.done();
    return out;
}

TrainOutcome run_train(const PipelineConfig& cfg) {
    const LabeledSet full = load_split(cfg, "train");
    const auto kept = load_selected(cfg);
    StageRunner run(cfg, "train");
    TrainOutcome out;
    const LabeledSet train = full.select_features(kept);
    out.model = run.stage("stack_fit", [&] { return stack_fit(train, stacking_with_params(cfg)); });
    if (fs::exists(cfg.output_dir / "encoder.json")) {
        out.model.encoder = read_json(cfg.output_dir / "encoder.json");
    }
    run.stage("write", [&] {
        write_json(cfg.output_dir / "model.json", out.model.to_json());
        run.artifact("model.json");
        for (std::size_t r = 0; r < out.model.base_learners().size(); ++r) {
            const auto& b = out.model.base_learners()[r];
            const fs::path rel = fs::path("models") / (std::to_string(r) + "_" + b->kind() + ".json");
            write_json(cfg.output_dir / rel, b->to_json());
            run.artifact(rel);
        }
    });
    run.counts()["train_rows"] = train.size();
    run.counts()["features"] = train.dims();
    out.manifest = run.done();
    return out;
}

EvaluateOutcome run_evaluate(const PipelineConfig& cfg, const fs::path& model_path, const std::string& split) {
    if (!fs::exists(model_path)) throw ConfigError("model file '" + model_path.string() + "' does not exist");
    const LabeledSet full = load_split(cfg, split);
    StageRunner run(cfg, "evaluate_" + split);
    EvaluateOutcome out;
    const StackingModel model = StackingModel::from_json(read_json(model_path));
    const LabeledSet data = full.select_features(model.feature_names());
    run.stage("predict", [&] {
        const auto proba = model.predict_proba(data.features);
        out.report = evaluate(data.labels, proba, display_name("stacking"), split);
        const Matrix base = model.base_probabilities(data.features);
        for (std::size_t r = 0; r < model.base_learners().size(); ++r) {
            out.base_reports.push_back(evaluate(data.labels, base.column(r),
                                                display_name(model.base_learners()[r]->kind()), split));
        }
    });
    run.stage("write", [&] {
        nlohmann::json doc = out.report.to_json();
        nlohmann::json bases = nlohmann::json::array();
        for (const auto& b : out.base_reports) {
            bases.push_back({{"model", b.model},
                             {"accuracy", b.metrics.accuracy.binary},
                             {"f1_weighted", b.metrics.f1.weighted},
                             {"auc", b.roc.auc}});
        }
        doc["base_learners"] = bases;
        write_json(cfg.output_dir / ("report_" + split + ".json"), doc);

        std::vector<NamedCurve> curves;
        curves.push_back({out.report.model, out.report.roc});
        for (const auto& b : out.base_reports) curves.push_back({b.model, b.roc});
        write_text(cfg.output_dir / ("roc_" + split + ".svg"), roc_svg(curves, "ROC curve (" + split + " split)"));
        write_text(cfg.output_dir / ("confusion_" + split + ".svg"),
                   confusion_svg(out.report.matrix, "Confusion matrix (" + split + " split)"));
    });
    for (const std::string a : {"report_", "roc_", "confusion_"}) {
        run.artifact(a + split + (a == "report_" ? ".json" : ".svg"));
    }
    run.counts()["rows"] = data.size();
    out.manifest = run.done();
    return out;
}

CompareOutcome run_compare(const PipelineConfig& cfg) {
    const LabeledSet train_full = load_split(cfg, "train");
    const LabeledSet test_full = load_split(cfg, "test");
    const auto kept = load_selected(cfg);
    StageRunner run(cfg, "compare");
    CompareOutcome out;
    const LabeledSet train = train_full.select_features(kept);
    const LabeledSet test = test_full.select_features(kept);

    auto row_for = [&](const std::string& kind, const std::vector<double>& proba) {
        const EvalReport r = evaluate(test.labels, proba, display_name(kind), "test");
        return ComparisonRow{kind, display_name(kind), r.metrics, r.roc.auc};
    };
    for (const auto& kind : learner_kinds()) {
        out.rows.push_back(run.stage(kind, [&] {
            auto learner = make_learner(kind, cfg.params_for(kind));
            learner->fit(train, cfg.seed);
            return row_for(kind, learner->predict_proba(test.features));
        }));
    }
    out.rows.push_back(run.stage("stacking", [&] {
        const StackingModel model = stack_fit(train, stacking_with_params(cfg));
        return row_for("stacking", model.predict_proba(test.features));
    }));
    run.stage("write", [&] {
        write_text(cfg.output_dir / "comparison.csv", comparison_csv(out.rows));
        write_text(cfg.output_dir / "comparison.txt", comparison_text(out.rows));
    });
    run.artifact("comparison.csv");
    run.artifact("comparison.txt");
    run.counts()["train_rows"] = train.size();
    run.counts()["test_rows"] = test.size();
    out.manifest = run.done();
    return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    out << "model,accuracy,precision,recall,f1\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%.4f,%.4f\n", r.model.c_str(), r.scores.accuracy.weighted,
                      r.scores.precision.weighted, r.scores.recall.weighted, r.scores.f1.weighted);
        out << buf;
    }
    return out.str();
}

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-20s %8s %8s %8s %8s\n", "Model", "Acc.", "Prec.", "Recall", "F1");
    out << buf << std::string(56, '-') << '\n';
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-20s %8.2f %8.2f %8.2f %8.2f\n", r.model.c_str(),
                      100.0 * r.scores.accuracy.weighted, 100.0 * r.scores.precision.weighted,
                      100.0 * r.scores.recall.weighted, 100.0 * r.scores.f1.weighted);
        out << buf;
    }
    return out.str();
}

Frame run_predict(const fs::path& model_path, const fs::path& input, const fs::path& output, bool encoded) {
    if (!fs::exists(model_path)) throw ConfigError("model file '" + model_path.string() + "' does not exist");
    if (!fs::exists(input)) throw ConfigError("input CSV '" + input.string() + "' does not exist");
    const StackingModel model = StackingModel::from_json(read_json(model_path));
    const Frame frame = read_csv(input);
    const auto& names = model.feature_names();

    // Rows with a missing model input get empty proba and label cells.
    std::vector<std::size_t> complete;
    Matrix x;
    if (encoded) {
        x = Matrix(frame.n_rows(), names.size());
        for (std::size_t j = 0; j < names.size(); ++j) {
            const std::size_t c = frame.column_index(names[j]);
            for (std::size_t r = 0; r < frame.n_rows(); ++r) {
                const Cell& cell = frame.at(r, c);
                if (!cell.is_number()) {
                    throw SchemaError("row " + std::to_string(r + 2) + ", column '" + names[j] + "' is not numeric");
                }
                x(r, j) = cell.number();
            }
        }
        for (std::size_t r = 0; r < frame.n_rows(); ++r) complete.push_back(r);
    } else {
        if (model.encoder.is_null()) throw SchemaError("model carries no encoder; pass --encoded input");
        const FittedEncoder enc = FittedEncoder::from_json(model.encoder);
        FittedEncoder subset = enc;
        subset.columns.clear();
        std::vector<std::size_t> cols;
        for (const auto& n : names) {
            const ColumnEncoding* col = enc.find(n);
            if (!col) throw SchemaError("encoder has no column '" + n + "'");
            subset.columns.push_back(*col);
            cols.push_back(frame.column_index(n));
        }
        for (std::size_t r = 0; r < frame.n_rows(); ++r) {
            bool ok = true;
            for (std::size_t c : cols) ok = ok && !frame.at(r, c).is_missing();
            if (ok) complete.push_back(r);
        }
        x = transform_features(frame.take_rows(complete), subset);
    }

    const auto proba = model.predict_proba(x);
    std::vector<std::string> out_names = frame.column_names();
    std::vector<ColumnKind> out_kinds = frame.column_kinds();
    for (const char* extra : {"proba", "label"}) {
        if (frame.find_column(extra)) throw SchemaError(std::string("input already has a '") + extra + "' column");
        out_names.push_back(extra);
        out_kinds.push_back(ColumnKind::numeric);
    }
    std::vector<std::vector<Cell>> rows = frame.rows();
    for (auto& row : rows) row.resize(row.size() + 2);
    for (std::size_t k = 0; k < complete.size(); ++k) {
        auto& row = rows[complete[k]];
        row[row.size() - 2] = Cell(proba[k]);
        row[row.size() - 1] = Cell(proba[k] >= 0.5 ? 1.0 : 0.0);
    }
    Frame result(std::move(out_names), std::move(out_kinds), std::move(rows));
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    write_csv(output, result);
    return result;
}

FullRun run_all(const PipelineConfig& cfg) {
    FullRun r;
    r.preprocess = run_preprocess(cfg);
    r.select = run_select(cfg);
    r.train = run_train(cfg);
    r.evaluate = run_evaluate(cfg, cfg.output_dir / "model.json", "test");
    r.compare = run_compare(cfg);
    return r;
}

}  // namespace stackline
