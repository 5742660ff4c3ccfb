#include <algorithm>
#include <cmath>
#include <numbers>

#include "stackline/learners.hpp"

namespace stackline {

void NaiveBayesModel::fit(const LabeledSet& train, std::uint64_t /*seed*/) {
    detail::require_fit_input(train, kind(), true);
    const std::size_t d = train.dims();
    std::size_t n[2] = {0, 0};
    for (int c = 0; c < 2; ++c) {
        mean_[c].assign(d, 0.0);
        var_[c].assign(d, 0.0);
    }
    for (std::size_t i = 0; i < train.size(); ++i) {
        const int c = train.labels[i];
        ++n[c];
        auto row = train.features.row(i);
        for (std::size_t j = 0; j < d; ++j) mean_[c][j] += row[j];
    }
    for (int c = 0; c < 2; ++c) {
        for (double& m : mean_[c]) m /= static_cast<double>(n[c]);
    }
    for (std::size_t i = 0; i < train.size(); ++i) {
        const int c = train.labels[i];
        auto row = train.features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = row[j] - mean_[c][j];
            var_[c][j] += diff * diff;
        }
    }
    for (int c = 0; c < 2; ++c) {
        for (double& v : var_[c]) v = std::max(v / static_cast<double>(n[c]), params_.var_floor);
        log_prior_[c] = std::log(static_cast<double>(n[c]) / static_cast<double>(train.size()));
    }
}

std::vector<double> NaiveBayesModel::predict_proba(const Matrix& x) const {
    if (mean_[0].empty()) throw TrainingError("nb: model is not fitted");
    detail::require_dims(x, mean_[0].size(), kind());
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        double log_joint[2];
        for (int c = 0; c < 2; ++c) {
            double s = log_prior_[c];
            for (std::size_t j = 0; j < row.size(); ++j) {
                const double diff = row[j] - mean_[c][j];
                s -= 0.5 * (std::log(2.0 * std::numbers::pi * var_[c][j]) + diff * diff / var_[c][j]);
            }
            log_joint[c] = s;
        }
        out[r] = sigmoid(log_joint[1] - log_joint[0]);
    }
    return out;
}

nlohmann::json NaiveBayesModel::to_json() const {
    auto doc = detail::model_header(kind());
    doc["hyperparameters"] = {{"var_floor", detail::encode_double(params_.var_floor)}};
    for (int c = 0; c < 2; ++c) {
        const std::string key = c == 1 ? "positive" : "negative";
        doc[key] = {{"mean", detail::encode_doubles(mean_[c])},
                    {"variance", detail::encode_doubles(var_[c])},
                    {"log_prior", detail::encode_double(log_prior_[c])}};
    }
    return doc;
}

std::unique_ptr<NaiveBayesModel> NaiveBayesModel::from_json(const nlohmann::json& doc) {
    detail::check_model_header(doc, "nb");
    NaiveBayesParams p;
    p.var_floor = detail::decode_double(doc.at("hyperparameters").at("var_floor"));
    auto m = std::make_unique<NaiveBayesModel>(p);
    for (int c = 0; c < 2; ++c) {
        const auto& j = doc.at(c == 1 ? "positive" : "negative");
        m->mean_[c] = detail::decode_doubles(j.at("mean"));
        m->var_[c] = detail::decode_doubles(j.at("variance"));
        m->log_prior_[c] = detail::decode_double(j.at("log_prior"));
    }
    return m;
}

}  // namespace stackline
