#include <algorithm>
#include <cmath>
#include <numeric>

#include "stackline/learners.hpp"
#include "stackline/rng.hpp"

namespace stackline {

PlattScaling fit_platt(std::span<const double> decision, std::span<const int> labels) {
    if (decision.size() != labels.size()) throw ShapeError("platt: decision values and labels differ");
    // Lin, Lin & Weng's Newton method on P(y=1|f) = 1 / (1 + exp(A f + B)).
    double prior1 = 0.0;
    for (int l : labels) prior1 += l;
    const double prior0 = static_cast<double>(labels.size()) - prior1;
    const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo_target = 1.0 / (prior0 + 2.0);
    std::vector<double> t(labels.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = labels[i] == 1 ? hi_target : lo_target;

    auto objective = [&](double a, double b) {
        double f = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double z = decision[i] * a + b;
            f += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z))
                          : (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return f;
    };

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    double fval = objective(a, b);
    constexpr double sigma = 1e-12;
    for (int iter = 0; iter < 100; ++iter) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double z = decision[i] * a + b;
            double p, q;
            if (z >= 0.0) {
                const double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                const double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            const double d2 = p * q;
            h11 += decision[i] * decision[i] * d2;
            h22 += d2;
            h21 += decision[i] * d2;
            const double d1 = t[i] - p;
            g1 += decision[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;
        double step = 1.0;
        while (step >= 1e-10) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = objective(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if (step < 1e-10) break;
    }
    // Convert to p = sigmoid(a f + b).
    return {-a, -b};
}

double SvmModel::decision_value(std::span<const double> x) const {
    double s = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j) s += weights_[j] * x[j];
    return s;
}

double SvmModel::objective(const LabeledSet& data, std::span<const double> weights,
                           double bias) const {
    double norm2 = 0.0;
    for (double w : weights) norm2 += w * w;
    double hinge = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double y = data.labels[i] == 1 ? 1.0 : -1.0;
        double s = bias;
        auto row = data.features.row(i);
        for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * row[j];
        hinge += std::max(0.0, 1.0 - y * s);
    }
    return 0.5 * norm2 + params_.lambda * hinge;
}

void SvmModel::fit(const LabeledSet& train, std::uint64_t seed) {
    detail::require_fit_input(train, kind(), true);
    const std::size_t m = train.size();
    const std::size_t d = train.dims();
    // 0.5|w|^2 + lambda * sum(hinge) is lambda*m times the averaged form
    // (mu/2)|w|^2 + mean(hinge) with mu = 1/(lambda*m); steps are 1/(mu t).
    const double mu = 1.0 / (params_.lambda * static_cast<double>(m));
    const double radius = 1.0 / std::sqrt(mu);

    std::vector<double> w(d, 0.0), w_avg(d, 0.0);
    double b = 0.0, b_avg = 0.0;
    std::size_t averaged = 0;
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    history_.clear();

    std::size_t t = 0;
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        rng.shuffle(std::span(order));
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (mu * static_cast<double>(t));
            const double y = train.labels[i] == 1 ? 1.0 : -1.0;
            auto row = train.features.row(i);
            double s = b;
            for (std::size_t j = 0; j < d; ++j) s += w[j] * row[j];
            const double shrink = 1.0 - eta * mu;
            for (double& wj : w) wj *= shrink;
            if (y * s < 1.0) {
                for (std::size_t j = 0; j < d; ++j) w[j] += eta * y * row[j];
                b += eta * y;
            }
            double norm2 = 0.0;
            for (double wj : w) norm2 += wj * wj;
            if (norm2 > radius * radius) {
                const double scale = radius / std::sqrt(norm2);
                for (double& wj : w) wj *= scale;
            }
            // The first epoch is burn-in; average the iterates after it.
            if (epoch > 0) {
                ++averaged;
                const double inv = 1.0 / static_cast<double>(averaged);
                for (std::size_t j = 0; j < d; ++j) w_avg[j] += (w[j] - w_avg[j]) * inv;
                b_avg += (b - b_avg) * inv;
            }
        }
        const double obj = averaged > 0 ? objective(train, w_avg, b_avg) : objective(train, w, b);
        if (!std::isfinite(obj)) {
            throw DivergenceError("svm: objective is not finite at epoch " + std::to_string(epoch));
        }
        history_.push_back(obj);
    }
    if (averaged > 0) {
        weights_ = w_avg;
        bias_ = b_avg;
    } else {
        weights_ = w;
        bias_ = b;
    }

    std::vector<double> decisions(m);
    for (std::size_t i = 0; i < m; ++i) decisions[i] = decision_value(train.features.row(i));
    platt_ = fit_platt(decisions, train.labels);
}

std::vector<double> SvmModel::predict_proba(const Matrix& x) const {
    if (weights_.empty()) throw TrainingError("svm: model is not fitted");
    detail::require_dims(x, weights_.size(), kind());
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = platt_(decision_value(x.row(r)));
    return out;
}

nlohmann::json SvmModel::to_json() const {
    auto doc = detail::model_header(kind());
    doc["hyperparameters"] = {{"lambda", detail::encode_double(params_.lambda)},
                              {"epochs", params_.epochs}};
    doc["weights"] = detail::encode_doubles(weights_);
    doc["bias"] = detail::encode_double(bias_);
    doc["platt"] = {{"a", detail::encode_double(platt_.a)}, {"b", detail::encode_double(platt_.b)}};
    return doc;
}

std::unique_ptr<SvmModel> SvmModel::from_json(const nlohmann::json& doc) {
    detail::check_model_header(doc, "svm");
    SvmParams p;
    const auto& h = doc.at("hyperparameters");
    p.lambda = detail::decode_double(h.at("lambda"));
    p.epochs = h.at("epochs").get<int>();
    auto m = std::make_unique<SvmModel>(p);
    m->weights_ = detail::decode_doubles(doc.at("weights"));
    m->bias_ = detail::decode_double(doc.at("bias"));
    m->platt_.a = detail::decode_double(doc.at("platt").at("a"));
    m->platt_.b = detail::decode_double(doc.at("platt").at("b"));
    return m;
}

}  // namespace stackline
