#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackline/learners.hpp"

namespace stackline {

/// A base learner by type tag plus hyperparameter overrides.
struct LearnerSpec {
    std::string kind;
    nlohmann::json params = nlohmann::json::object();
};

struct StackingConfig {
    std::vector<LearnerSpec> base_learners = {{"knn"}, {"svm"}, {"mlp"}, {"adaboost"}};
    int n_folds = 5;
    std::uint64_t seed = 42;
    LogRegParams meta;

    nlohmann::json to_json() const;
    static StackingConfig from_json(const nlohmann::json& doc);
};

using LearnerFactory = std::function<LearnerPtr()>;

/// Seed for learner r on fold f; the full-data refit uses f = n_folds.
std::uint64_t derive_seed(std::uint64_t seed, std::size_t learner_index, std::size_t fold_index);

/// Stratified fold id per row: each class is shuffled with the seed and dealt
/// round-robin, positives continuing where negatives stopped. Throws
/// StratificationError when some fold lacks a class.
std::vector<int> stratified_folds(std::span<const int> labels, int n_folds, std::uint64_t seed);

struct MetaFeatures {
    /// n_train x R out-of-fold probabilities.
    Matrix values;
    std::vector<int> fold_of_row;
};

/// Out-of-fold probabilities: for every fold, each learner is fitted on the
/// other folds and predicts the held-out rows.
MetaFeatures build_meta_features(const LabeledSet& train, const std::vector<LearnerFactory>& learners,
                                 int n_folds, std::uint64_t seed);
MetaFeatures build_meta_features(const LabeledSet& train, const StackingConfig& cfg);

/// Trained stack: base learners refitted on the full training set and a
/// logistic-regression meta-learner over their probabilities.
class StackingModel {
public:
    std::vector<double> predict_proba(const Matrix& x) const;
    std::vector<int> predict(const Matrix& x) const;

    /// Per-base-learner probabilities (n x R), the meta-learner's input.
    Matrix base_probabilities(const Matrix& x) const;

    const std::vector<LearnerPtr>& base_learners() const { return bases_; }
    const LogRegModel& meta() const { return meta_; }
    LogRegModel& meta() { return meta_; }
    const std::vector<int>& fold_assignment() const { return folds_; }
    const StackingConfig& config() const { return config_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    /// Optional preprocessing document carried along for prediction on raw input.
    nlohmann::json encoder;

    nlohmann::json to_json() const;
    static StackingModel from_json(const nlohmann::json& doc);

private:
    friend StackingModel stack_fit(const LabeledSet&, const StackingConfig&,
                                   const std::vector<LearnerFactory>&);
    std::vector<LearnerPtr> bases_;
    LogRegModel meta_;
    std::vector<int> folds_;
    StackingConfig config_;
    std::vector<std::string> feature_names_;
};

StackingModel stack_fit(const LabeledSet& train, const StackingConfig& cfg);
/// Same, with explicit factories in place of cfg.base_learners (cfg still
/// provides folds, seed and meta hyperparameters).
StackingModel stack_fit(const LabeledSet& train, const StackingConfig& cfg,
                        const std::vector<LearnerFactory>& learners);

/// Factories for the configured base learners.
std::vector<LearnerFactory> factories_for(const std::vector<LearnerSpec>& specs);

/// Hex SHA-256 of a JSON document's compact serialization.
std::string json_digest(const nlohmann::json& doc);

}  // namespace stackline
