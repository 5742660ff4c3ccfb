#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackline/frame.hpp"
#include "stackline/matrix.hpp"

namespace stackline {

/// Logistic function 1 / (1 + e^-u), evaluated without overflow.
double sigmoid(double u);

/// Mean binary cross-entropy of logits against 0/1 targets, computed as
/// softplus(z) - t*z so that saturated logits stay finite.
double bce_from_logits(std::span<const double> logits, std::span<const int> targets);

/// Common binary classifier contract.
///
/// fit() is deterministic given its seed, predict_proba() returns values in
/// [0,1], and predict() is exactly (predict_proba >= 0.5).
class Learner {
public:
    virtual ~Learner() = default;

    /// Stable type tag, e.g. "knn".
    virtual std::string kind() const = 0;
    virtual void fit(const LabeledSet& train, std::uint64_t seed) = 0;
    virtual std::vector<double> predict_proba(const Matrix& x) const = 0;

    std::vector<int> predict(const Matrix& x) const;

    /// Versioned model document: type tag, hyperparameters and parameter
    /// arrays as 17-significant-digit decimal strings.
    virtual nlohmann::json to_json() const = 0;
    virtual std::unique_ptr<Learner> clone_untrained() const = 0;
};

using LearnerPtr = std::unique_ptr<Learner>;

// ---------------------------------------------------------------------------

struct KnnParams {
    int k = 5;
};

/// k-nearest neighbours under Euclidean distance. Probability is the fraction
/// of positive labels among the k nearest training rows; equal distances are
/// ordered by training-row index.
class KnnModel : public Learner {
public:
    explicit KnnModel(KnnParams params = {}) : params_(params) {}

    std::string kind() const override { return "knn"; }
    void fit(const LabeledSet& train, std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& x) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Learner> clone_untrained() const override {
        return std::make_unique<KnnModel>(params_);
    }
    static std::unique_ptr<KnnModel> from_json(const nlohmann::json& doc);

    double predict_proba_one(std::span<const double> query) const;
    const KnnParams& params() const { return params_; }

private:
    KnnParams params_;
    Matrix x_;
    std::vector<int> y_;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------

/// Platt sigmoid p = sigmoid(a * f + b) over decision values f.
struct PlattScaling {
    double a = 1.0;
    double b = 0.0;

    double operator()(double decision) const { return sigmoid(a * decision + b); }
};

/// Maximum-likelihood Platt fit with smoothed targets (Newton steps with
/// backtracking line search).
PlattScaling fit_platt(std::span<const double> decision, std::span<const int> labels);

struct SvmParams {
    /// Hinge-loss weight of 0.5|w|^2 + lambda * sum max(0, 1 - y(w.x + b)).
    double lambda = 0.01;
    int epochs = 100;
};

/// Linear soft-margin SVM trained in the primal by stochastic subgradient
/// steps, returning the averaged iterate and a Platt calibration.
class SvmModel : public Learner {
public:
    explicit SvmModel(SvmParams params = {}) : params_(params) {}

    std::string kind() const override { return "svm"; }
    void fit(const LabeledSet& train, std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& x) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Learner> clone_untrained() const override {
        return std::make_unique<SvmModel>(params_);
    }
    static std::unique_ptr<SvmModel> from_json(const nlohmann::json& doc);

    double decision_value(std::span<const double> x) const;
    /// Primal objective for arbitrary parameters on a data set.
    double objective(const LabeledSet& data, std::span<const double> weights, double bias) const;

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    const PlattScaling& calibration() const { return platt_; }
    /// Objective of the averaged iterate at the end of every epoch.
    const std::vector<double>& objective_history() const { return history_; }

private:
    SvmParams params_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    PlattScaling platt_;
    std::vector<double> history_;
};

// ---------------------------------------------------------------------------

struct MlpParams {
    int hidden_units = 16;
    double learning_rate = 0.05;
    int epochs = 500;
};

/// One-hidden-layer perceptron with sigmoid units everywhere, trained by
/// full-batch gradient descent on binary cross-entropy.
///
/// Flat parameter layout: hidden weights (hidden x inputs, row-major), hidden
/// biases, output weights, output bias.
class MlpModel : public Learner {
public:
    explicit MlpModel(MlpParams params = {}) : params_(params) {}

    std::string kind() const override { return "mlp"; }
    void fit(const LabeledSet& train, std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& x) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Learner> clone_untrained() const override {
        return std::make_unique<MlpModel>(params_);
    }
    static std::unique_ptr<MlpModel> from_json(const nlohmann::json& doc);

    static std::size_t parameter_count(std::size_t inputs, std::size_t hidden) {
        return hidden * inputs + 2 * hidden + 1;
    }
    /// Mean cross-entropy and its gradient for a flat parameter vector.
    static double loss_and_gradient(std::span<const double> params, std::size_t hidden,
                                    const Matrix& x, std::span<const int> y,
                                    std::vector<double>* grad);

    void set_parameters(std::size_t inputs, std::vector<double> params);
    const std::vector<double>& parameters() const { return params_flat_; }
    double final_loss() const { return final_loss_; }

private:
    MlpParams params_;
    std::size_t inputs_ = 0;
    std::vector<double> params_flat_;
    double final_loss_ = 0.0;
};

// ---------------------------------------------------------------------------

/// Depth-1 tree voting polarity * (x[feature] > threshold ? +1 : -1).
struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 1;

    int vote(std::span<const double> x) const {
        return x[feature] > threshold ? polarity : -polarity;
    }
};

/// Weight of a weak learner with weighted error eps: 0.5 * ln((1 - eps) / eps).
double adaboost_beta(double eps);

/// Lowest weighted-error stump over every feature, midpoint threshold and
/// polarity. Labels are in {-1, +1}; weights need not be normalized.
/// Returns false when every feature is constant.
bool best_weighted_stump(const Matrix& x, std::span<const int> signs, std::span<const double> weights,
                         Stump& best, double& weighted_error);

struct AdaBoostParams {
    int rounds = 50;
};

/// Discrete AdaBoost over decision stumps.
class AdaBoostModel : public Learner {
public:
    explicit AdaBoostModel(AdaBoostParams params = {}) : params_(params) {}

    std::string kind() const override { return "adaboost"; }
    void fit(const LabeledSet& train, std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& x) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Learner> clone_untrained() const override {
        return std::make_unique<AdaBoostModel>(params_);
    }
    static std::unique_ptr<AdaBoostModel> from_json(const nlohmann::json& doc);

    /// Sum of beta_k * g_k(x) divided by sum of beta_k, in [-1, 1].
    double normalized_margin(std::span<const double> x) const;

    struct Round {
        double weighted_error = 0.0;
        double beta = 0.0;
        /// Sample-weight total after the update and renormalization.
        double weight_sum = 0.0;
        /// Ensemble training accuracy after this round.
        double train_accuracy = 0.0;
    };

    const std::vector<Stump>& stumps() const { return stumps_; }
    const std::vector<double>& betas() const { return betas_; }
    const std::vector<Round>& trace() const { return trace_; }

private:
    AdaBoostParams params_;
    std::vector<Stump> stumps_;
    std::vector<double> betas_;
    std::vector<Round> trace_;
    std::size_t inputs_ = 0;
};

// ---------------------------------------------------------------------------

struct LogRegParams {
    double learning_rate = 0.1;
    int epochs = 1000;
};

/// Logistic regression fitted by full-batch gradient descent from zero weights.
/// Also serves as the stacking meta-learner.
class LogRegModel : public Learner {
public:
    explicit LogRegModel(LogRegParams params = {}) : params_(params) {}

    std::string kind() const override { return "logreg"; }
    void fit(const LabeledSet& train, std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& x) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Learner> clone_untrained() const override {
        return std::make_unique<LogRegModel>(params_);
    }
    static std::unique_ptr<LogRegModel> from_json(const nlohmann::json& doc);

    /// Mean cross-entropy and gradient; the gradient layout is weights then bias.
    static double loss_and_gradient(std::span<const double> weights, double bias, const Matrix& x,
                                    std::span<const int> y, std::vector<double>* grad);

    double predict_proba_one(std::span<const double> x) const;
    void set_parameters(std::vector<double> weights, double bias);
    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    double final_loss() const { return final_loss_; }

private:
    LogRegParams params_;
    std::vector<double> weights_;
    double bias_ = 0.0;
    double final_loss_ = 0.0;
};

// ---------------------------------------------------------------------------

struct NaiveBayesParams {
    double var_floor = 1e-9;
};

/// Gaussian naive Bayes with class priors from training frequencies.
class NaiveBayesModel : public Learner {
public:
    explicit NaiveBayesModel(NaiveBayesParams params = {}) : params_(params) {}

    std::string kind() const override { return "nb"; }
    void fit(const LabeledSet& train, std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& x) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Learner> clone_untrained() const override {
        return std::make_unique<NaiveBayesModel>(params_);
    }
    static std::unique_ptr<NaiveBayesModel> from_json(const nlohmann::json& doc);

private:
    NaiveBayesParams params_;
    // Index 0: negative class, 1: positive class.
    std::vector<double> mean_[2];
    std::vector<double> var_[2];
    double log_prior_[2] = {0.0, 0.0};
};

// ---------------------------------------------------------------------------

struct GradBoostParams {
    int rounds = 100;
    double shrinkage = 0.1;
};

/// Regression stump with one value per side of the threshold.
struct RegressionStump {
    std::size_t feature = 0;
    double threshold = 0.0;
    double left = 0.0;   // x <= threshold
    double right = 0.0;  // x > threshold

    double value(std::span<const double> x) const { return x[feature] > threshold ? right : left; }
};

/// Gradient boosting on the logistic loss with stump base learners and
/// Newton leaf values, starting from the training log-odds.
class GradBoostModel : public Learner {
public:
    explicit GradBoostModel(GradBoostParams params = {}) : params_(params) {}

    std::string kind() const override { return "gboost"; }
    void fit(const LabeledSet& train, std::uint64_t seed) override;
    std::vector<double> predict_proba(const Matrix& x) const override;
    nlohmann::json to_json() const override;
    std::unique_ptr<Learner> clone_untrained() const override {
        return std::make_unique<GradBoostModel>(params_);
    }
    static std::unique_ptr<GradBoostModel> from_json(const nlohmann::json& doc);

    double raw_score(std::span<const double> x) const;
    const std::vector<RegressionStump>& stages() const { return stages_; }

private:
    GradBoostParams params_;
    double base_score_ = 0.0;
    std::vector<RegressionStump> stages_;
    std::size_t inputs_ = 0;
};

// ---------------------------------------------------------------------------

/// Builds an untrained learner from its type tag ("logreg", "knn", "svm",
/// "gboost", "adaboost", "nb", "mlp") and optional hyperparameter overrides.
LearnerPtr make_learner(const std::string& kind, const nlohmann::json& params = nlohmann::json::object());

/// Restores a trained learner from its to_json() document.
LearnerPtr learner_from_json(const nlohmann::json& doc);

/// Human-readable model name used in reports.
std::string display_name(const std::string& kind);

/// All single-model type tags in comparison-table order.
const std::vector<std::string>& learner_kinds();

namespace detail {
nlohmann::json encode_doubles(std::span<const double> values);
std::vector<double> decode_doubles(const nlohmann::json& values);
std::string encode_double(double v);
double decode_double(const nlohmann::json& v);
nlohmann::json model_header(const std::string& kind);
void check_model_header(const nlohmann::json& doc, const std::string& kind);
void require_fit_input(const LabeledSet& train, const std::string& kind, bool both_classes);
void require_dims(const Matrix& x, std::size_t expected, const std::string& kind);
}  // namespace detail

}  // namespace stackline
