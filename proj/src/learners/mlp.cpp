#include <cmath>

#include "stackline/learners.hpp"
#include "stackline/rng.hpp"

namespace stackline {

namespace {

struct MlpView {
    std::span<const double> w1;  // hidden x inputs
    std::span<const double> b1;  // hidden
    std::span<const double> w2;  // hidden
    double b2;

    MlpView(std::span<const double> p, std::size_t inputs, std::size_t hidden)
        : w1(p.subspan(0, hidden * inputs)),
          b1(p.subspan(hidden * inputs, hidden)),
          w2(p.subspan(hidden * inputs + hidden, hidden)),
          b2(p[hidden * inputs + 2 * hidden]) {}
};

// Output logit for one row; fills the hidden activations.
double forward(const MlpView& v, std::span<const double> x, std::size_t hidden,
               std::vector<double>& h) {
    const std::size_t inputs = x.size();
    double z2 = v.b2;
    for (std::size_t k = 0; k < hidden; ++k) {
        double z = v.b1[k];
        const double* wk = v.w1.data() + k * inputs;
        for (std::size_t j = 0; j < inputs; ++j) z += wk[j] * x[j];
        h[k] = sigmoid(z);
        z2 += v.w2[k] * h[k];
    }
    return z2;
}

}  // namespace

double MlpModel::loss_and_gradient(std::span<const double> params, std::size_t hidden,
                                   const Matrix& x, std::span<const int> y,
                                   std::vector<double>* grad) {
    const std::size_t inputs = x.cols();
    const std::size_t m = x.rows();
    if (params.size() != parameter_count(inputs, hidden)) {
        throw ShapeError("mlp: parameter vector has the wrong length");
    }
    const MlpView v(params, inputs, hidden);
    std::vector<double> h(hidden);
    std::vector<double> logits(m);
    if (grad) grad->assign(params.size(), 0.0);
    const double inv_m = m ? 1.0 / static_cast<double>(m) : 0.0;

    for (std::size_t i = 0; i < m; ++i) {
        auto row = x.row(i);
        logits[i] = forward(v, row, hidden, h);
        if (!grad) continue;
        double* g = grad->data();
        double* g_w1 = g;
        double* g_b1 = g + hidden * inputs;
        double* g_w2 = g_b1 + hidden;
        double* g_b2 = g_w2 + hidden;
        // dJ/dz2 for cross-entropy on a sigmoid output.
        const double dz2 = (sigmoid(logits[i]) - y[i]) * inv_m;
        *g_b2 += dz2;
        for (std::size_t k = 0; k < hidden; ++k) {
            g_w2[k] += dz2 * h[k];
            const double dz1 = dz2 * v.w2[k] * h[k] * (1.0 - h[k]);
            g_b1[k] += dz1;
            double* gk = g_w1 + k * inputs;
            for (std::size_t j = 0; j < inputs; ++j) gk[j] += dz1 * row[j];
        }
    }
    return bce_from_logits(logits, y);
}

void MlpModel::fit(const LabeledSet& train, std::uint64_t seed) {
    detail::require_fit_input(train, kind(), false);
    inputs_ = train.dims();
    const auto hidden = static_cast<std::size_t>(params_.hidden_units);
    params_flat_.resize(parameter_count(inputs_, hidden));
    Rng rng(seed);
    for (double& p : params_flat_) p = rng.uniform(-0.5, 0.5);

    std::vector<double> grad;
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        const double loss =
            loss_and_gradient(params_flat_, hidden, train.features, train.labels, &grad);
        if (!std::isfinite(loss)) {
            throw DivergenceError("mlp: loss is not finite at epoch " + std::to_string(epoch));
        }
        for (std::size_t i = 0; i < params_flat_.size(); ++i) {
            params_flat_[i] -= params_.learning_rate * grad[i];
        }
    }
    final_loss_ = loss_and_gradient(params_flat_, hidden, train.features, train.labels, nullptr);
    if (!std::isfinite(final_loss_)) {
        throw DivergenceError("mlp: loss is not finite at epoch " + std::to_string(params_.epochs));
    }
}

void MlpModel::set_parameters(std::size_t inputs, std::vector<double> params) {
    if (params.size() != parameter_count(inputs, static_cast<std::size_t>(params_.hidden_units))) {
        throw ShapeError("mlp: parameter vector has the wrong length");
    }
    inputs_ = inputs;
    params_flat_ = std::move(params);
}

std::vector<double> MlpModel::predict_proba(const Matrix& x) const {
    if (params_flat_.empty()) throw TrainingError("mlp: model is not fitted");
    detail::require_dims(x, inputs_, kind());
    const auto hidden = static_cast<std::size_t>(params_.hidden_units);
    const MlpView v(params_flat_, inputs_, hidden);
    std::vector<double> h(hidden);
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(forward(v, x.row(r), hidden, h));
    return out;
}

nlohmann::json MlpModel::to_json() const {
    auto doc = detail::model_header(kind());
    doc["hyperparameters"] = {{"hidden_units", params_.hidden_units},
                              {"learning_rate", detail::encode_double(params_.learning_rate)},
                              {"epochs", params_.epochs}};
    doc["n_features"] = inputs_;
    doc["parameters"] = detail::encode_doubles(params_flat_);
    doc["final_loss"] = detail::encode_double(final_loss_);
    return doc;
}

std::unique_ptr<MlpModel> MlpModel::from_json(const nlohmann::json& doc) {
    detail::check_model_header(doc, "mlp");
    MlpParams p;
    const auto& h = doc.at("hyperparameters");
    p.hidden_units = h.at("hidden_units").get<int>();
    p.learning_rate = detail::decode_double(h.at("learning_rate"));
    p.epochs = h.at("epochs").get<int>();
    auto m = std::make_unique<MlpModel>(p);
    m->set_parameters(doc.at("n_features").get<std::size_t>(),
                      detail::decode_doubles(doc.at("parameters")));
    m->final_loss_ = detail::decode_double(doc.at("final_loss"));
    return m;
}

}  // namespace stackline
