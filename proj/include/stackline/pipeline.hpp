#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackline/chi2.hpp"
#include "stackline/metrics.hpp"
#include "stackline/preprocess.hpp"
#include "stackline/stacking.hpp"
#include "stackline/synth.hpp"

namespace stackline {

/// Everything one experiment needs, loaded from a single JSON document.
///
/// The seed feeds every stage: the split uses `seed`, class balancing
/// `seed + 1`, stacking folds and all learner fits derive from `seed`.
struct PipelineConfig {
    std::filesystem::path input;
    std::filesystem::path output_dir = "stackline_out";
    std::uint64_t seed = 42;
    PreprocessConfig preprocess;
    SplitSpec split;
    double alpha = 0.05;
    StackingConfig stacking;
    /// Hyperparameter overrides per learner type tag.
    std::map<std::string, nlohmann::json> learner_params;
    SynthConfig synth;

    /// The fully merged document the typed fields were read from.
    nlohmann::json document;

    static nlohmann::json default_document();
    /// Merges `doc` over the defaults, applies dotted-path overrides
    /// ("stacking.n_folds=10"), then validates. Throws ConfigError.
    static PipelineConfig from_json(const nlohmann::json& doc,
                                    const std::vector<std::string>& overrides = {});
    static PipelineConfig load(const std::filesystem::path& path,
                               const std::vector<std::string>& overrides = {});

    std::string digest() const { return json_digest(document); }
    nlohmann::json params_for(const std::string& kind) const;
};

/// Sets a value inside a JSON document by dotted path. The value text is
/// parsed as JSON when possible, otherwise stored as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Per-command audit record written as manifest_<command>.json.
struct RunManifest {
    std::string command;
    std::string config_digest;
    std::vector<std::pair<std::string, double>> timings;
    std::vector<std::string> stages_completed;
    nlohmann::json counts = nlohmann::json::object();
    std::vector<std::filesystem::path> artifacts;
    std::string status = "ok";
    std::string failed_stage;
    std::string error;

    /// `timings` is kept under its own key so manifests can be compared
    /// without it.
    nlohmann::json to_json(const std::filesystem::path& root) const;
    /// Writes via a temporary file and rename.
    void write(const std::filesystem::path& root) const;
};

struct PreprocessOutcome {
    CleanReport clean;
    std::size_t train_rows_before_balance = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::size_t val_rows = 0;
    FittedEncoder encoder;
    RunManifest manifest;
};

/// clean -> split -> balance (train only) -> fit_encoder (train) -> transform.
PreprocessOutcome run_preprocess(const PipelineConfig& cfg);

struct SelectOutcome {
    FeatureSelection selection;
    RunManifest manifest;
};

SelectOutcome run_select(const PipelineConfig& cfg);

struct TrainOutcome {
    StackingModel model;
    RunManifest manifest;
};

TrainOutcome run_train(const PipelineConfig& cfg);

struct EvaluateOutcome {
    EvalReport report;
    std::vector<EvalReport> base_reports;
    RunManifest manifest;
};

/// Evaluates a stacked model file on the named split (train, test or val).
EvaluateOutcome run_evaluate(const PipelineConfig& cfg, const std::filesystem::path& model_path,
                             const std::string& split);

struct ComparisonRow {
    std::string kind;
    std::string model;
    Scores scores;
    double auc = 0.0;
};

struct CompareOutcome {
    std::vector<ComparisonRow> rows;
    RunManifest manifest;
};

/// Trains the seven single models and the stack on identical data and seeds,
/// scoring each on the test split.
CompareOutcome run_compare(const PipelineConfig& cfg);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::string comparison_text(const std::vector<ComparisonRow>& rows);

/// Appends proba and label columns to `input`. With `encoded` the input is
/// already numeric (a split CSV); otherwise the model's embedded encoder is applied.
Frame run_predict(const std::filesystem::path& model_path, const std::filesystem::path& input,
                  const std::filesystem::path& output, bool encoded);

/// Runs preprocess, select and compare in sequence.
struct FullRun {
    PreprocessOutcome preprocess;
    SelectOutcome select;
    TrainOutcome train;
    EvaluateOutcome evaluate;
    CompareOutcome compare;
};
FullRun run_all(const PipelineConfig& cfg);

/// Writes text to a file, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

}  // namespace stackline
