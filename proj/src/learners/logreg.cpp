#include <cmath>

#include "stackline/learners.hpp"

namespace stackline {

double LogRegModel::loss_and_gradient(std::span<const double> weights, double bias, const Matrix& x,
                                      std::span<const int> y, std::vector<double>* grad) {
    const std::size_t m = x.rows();
    const std::size_t d = x.cols();
    std::vector<double> logits(m);
    for (std::size_t i = 0; i < m; ++i) {
        double z = bias;
        auto row = x.row(i);
        for (std::size_t j = 0; j < d; ++j) z += weights[j] * row[j];
        logits[i] = z;
    }
    const double loss = bce_from_logits(logits, y);
    if (grad) {
        grad->assign(d + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double residual = sigmoid(logits[i]) - y[i];
            auto row = x.row(i);
            for (std::size_t j = 0; j < d; ++j) (*grad)[j] += residual * row[j];
            (*grad)[d] += residual;
        }
        for (double& g : *grad) g /= static_cast<double>(m);
    }
    return loss;
}

void LogRegModel::fit(const LabeledSet& train, std::uint64_t /*seed*/) {
    detail::require_fit_input(train, kind(), false);
    const std::size_t d = train.dims();
    weights_.assign(d, 0.0);
    bias_ = 0.0;
    std::vector<double> grad;
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        const double loss = loss_and_gradient(weights_, bias_, train.features, train.labels, &grad);
        if (!std::isfinite(loss)) {
            throw DivergenceError("logreg: loss is not finite at epoch " + std::to_string(epoch));
        }
        for (std::size_t j = 0; j < d; ++j) weights_[j] -= params_.learning_rate * grad[j];
        bias_ -= params_.learning_rate * grad[d];
    }
    final_loss_ = loss_and_gradient(weights_, bias_, train.features, train.labels, nullptr);
    if (!std::isfinite(final_loss_)) {
        throw DivergenceError("logreg: loss is not finite at epoch " + std::to_string(params_.epochs));
    }
}

double LogRegModel::predict_proba_one(std::span<const double> x) const {
    double z = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j) z += weights_[j] * x[j];
    return sigmoid(z);
}

std::vector<double> LogRegModel::predict_proba(const Matrix& x) const {
    detail::require_dims(x, weights_.size(), kind());
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_proba_one(x.row(r));
    return out;
}

void LogRegModel::set_parameters(std::vector<double> weights, double bias) {
    weights_ = std::move(weights);
    bias_ = bias;
}

nlohmann::json LogRegModel::to_json() const {
    auto doc = detail::model_header(kind());
    doc["hyperparameters"] = {{"learning_rate", detail::encode_double(params_.learning_rate)},
                              {"epochs", params_.epochs}};
    doc["weights"] = detail::encode_doubles(weights_);
    doc["bias"] = detail::encode_double(bias_);
    doc["final_loss"] = detail::encode_double(final_loss_);
    return doc;
}

std::unique_ptr<LogRegModel> LogRegModel::from_json(const nlohmann::json& doc) {
    detail::check_model_header(doc, "logreg");
    LogRegParams p;
    const auto& h = doc.at("hyperparameters");
    p.learning_rate = detail::decode_double(h.at("learning_rate"));
    p.epochs = h.at("epochs").get<int>();
    auto m = std::make_unique<LogRegModel>(p);
    m->weights_ = detail::decode_doubles(doc.at("weights"));
    m->bias_ = detail::decode_double(doc.at("bias"));
    m->final_loss_ = detail::decode_double(doc.at("final_loss"));
    return m;
}

}  // namespace stackline
