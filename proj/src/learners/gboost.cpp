#include <cmath>
#include <limits>

#include "stackline/learners.hpp"
#include "stump_search.hpp"

namespace stackline {

namespace {

// Least-squares stump on the residuals; leaf values are filled in by the caller.
bool best_regression_split(const detail::SortedColumns& cols, std::span<const double> residual,
                           RegressionStump& best) {
    const std::size_t n = residual.size();
    double total = 0.0;
    for (double r : residual) total += r;
    double left = 0.0;
    double best_gain = -std::numeric_limits<double>::infinity();
    bool found = false;
    detail::sweep_splits(
        cols,
        [&](std::size_t, std::size_t row, bool reset) {
            if (reset) {
                left = 0.0;
                return;
            }
            left += residual[row];
        },
        [&](std::size_t feature, double threshold, std::size_t n_left) {
            const double n_l = static_cast<double>(n_left);
            const double n_r = static_cast<double>(n - n_left);
            const double right = total - left;
            const double gain = left * left / n_l + right * right / n_r;
            if (gain > best_gain) {
                best_gain = gain;
                best.feature = feature;
                best.threshold = threshold;
                found = true;
            }
        });
    return found;
}

}  // namespace

void GradBoostModel::fit(const LabeledSet& train, std::uint64_t /*seed*/) {
    detail::require_fit_input(train, kind(), true);
    const std::size_t n = train.size();
    inputs_ = train.dims();
    stages_.clear();

    const double p1 = static_cast<double>(train.count(1)) / static_cast<double>(n);
    base_score_ = std::log(p1 / (1.0 - p1));
    std::vector<double> score(n, base_score_);
    std::vector<double> residual(n), hess(n);
    const detail::SortedColumns cols(train.features);

    for (int m = 0; m < params_.rounds; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(score[i]);
            residual[i] = train.labels[i] - p;
            hess[i] = p * (1.0 - p);
        }
        RegressionStump stage;
        if (!best_regression_split(cols, residual, stage)) {
            if (m == 0) throw TrainingError("gboost: no valid split (all features are constant)");
            break;
        }
        double num_l = 0.0, den_l = 0.0, num_r = 0.0, den_r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (train.features(i, stage.feature) > stage.threshold) {
                num_r += residual[i];
                den_r += hess[i];
            } else {
                num_l += residual[i];
                den_l += hess[i];
            }
        }
        constexpr double kMinHess = 1e-12;
        stage.left = params_.shrinkage * (den_l > kMinHess ? num_l / den_l : 0.0);
        stage.right = params_.shrinkage * (den_r > kMinHess ? num_r / den_r : 0.0);
        if (!std::isfinite(stage.left) || !std::isfinite(stage.right)) {
            throw DivergenceError("gboost: non-finite stage value at round " + std::to_string(m));
        }
        for (std::size_t i = 0; i < n; ++i) score[i] += stage.value(train.features.row(i));
        stages_.push_back(stage);
    }
}

double GradBoostModel::raw_score(std::span<const double> x) const {
    double s = base_score_;
    for (const auto& st : stages_) s += st.value(x);
    return s;
}

std::vector<double> GradBoostModel::predict_proba(const Matrix& x) const {
    if (inputs_ == 0) throw TrainingError("gboost: model is not fitted");
    detail::require_dims(x, inputs_, kind());
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(raw_score(x.row(r)));
    return out;
}

nlohmann::json GradBoostModel::to_json() const {
    auto doc = detail::model_header(kind());
    doc["hyperparameters"] = {{"rounds", params_.rounds},
                              {"shrinkage", detail::encode_double(params_.shrinkage)}};
    doc["n_features"] = inputs_;
    doc["base_score"] = detail::encode_double(base_score_);
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : stages_) {
        stages.push_back({{"feature", s.feature},
                          {"threshold", detail::encode_double(s.threshold)},
                          {"left", detail::encode_double(s.left)},
                          {"right", detail::encode_double(s.right)}});
    }
    doc["stages"] = stages;
    return doc;
}

std::unique_ptr<GradBoostModel> GradBoostModel::from_json(const nlohmann::json& doc) {
    detail::check_model_header(doc, "gboost");
    GradBoostParams p;
    const auto& h = doc.at("hyperparameters");
    p.rounds = h.at("rounds").get<int>();
    p.shrinkage = detail::decode_double(h.at("shrinkage"));
    auto m = std::make_unique<GradBoostModel>(p);
    m->inputs_ = doc.at("n_features").get<std::size_t>();
    m->base_score_ = detail::decode_double(doc.at("base_score"));
    for (const auto& s : doc.at("stages")) {
        RegressionStump st;
        st.feature = s.at("feature").get<std::size_t>();
        st.threshold = detail::decode_double(s.at("threshold"));
        st.left = detail::decode_double(s.at("left"));
        st.right = detail::decode_double(s.at("right"));
        if (st.feature >= m->inputs_) throw SchemaError("gboost: stage feature out of range");
        m->stages_.push_back(st);
    }
    return m;
}

}  // namespace stackline
