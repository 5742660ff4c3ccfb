#include <cmath>
#include <limits>

#include "stackline/learners.hpp"
#include "stump_search.hpp"

namespace stackline {

double adaboost_beta(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("weighted error must lie in (0,1)");
    return 0.5 * std::log((1.0 - eps) / eps);
}

namespace {

bool search(const detail::SortedColumns& cols, std::span<const int> signs,
            std::span<const double> weights, Stump& best, double& weighted_error) {
    double total = 0.0, total_pos = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        total += weights[i];
        if (signs[i] > 0) total_pos += weights[i];
    }
    const double total_neg = total - total_pos;
    double left_pos = 0.0, left_neg = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    bool found = false;

    detail::sweep_splits(
        cols,
        [&](std::size_t, std::size_t row, bool reset) {
            if (reset) {
                left_pos = left_neg = 0.0;
                return;
            }
            (signs[row] > 0 ? left_pos : left_neg) += weights[row];
        },
        [&](std::size_t feature, double threshold, std::size_t) {
            // Polarity +1 votes -1 on the left and +1 on the right.
            const double err_plus = left_pos + (total_neg - left_neg);
            const double err_minus = total - err_plus;
            if (err_plus < best_err) {
                best_err = err_plus;
                best = {feature, threshold, 1};
                found = true;
            }
            if (err_minus < best_err) {
                best_err = err_minus;
                best = {feature, threshold, -1};
                found = true;
            }
        });
    if (found) weighted_error = std::clamp(best_err / total, 0.0, 1.0);
    return found;
}

}  // namespace

bool best_weighted_stump(const Matrix& x, std::span<const int> signs, std::span<const double> weights,
                         Stump& best, double& weighted_error) {
    if (signs.size() != x.rows() || weights.size() != x.rows()) {
        throw ShapeError("stump search: labels/weights do not match rows");
    }
    const detail::SortedColumns cols(x);
    return search(cols, signs, weights, best, weighted_error);
}

void AdaBoostModel::fit(const LabeledSet& train, std::uint64_t /*seed*/) {
    detail::require_fit_input(train, kind(), true);
    const std::size_t n = train.size();
    inputs_ = train.dims();
    stumps_.clear();
    betas_.clear();
    trace_.clear();

    std::vector<int> signs(n);
    for (std::size_t i = 0; i < n; ++i) signs[i] = train.labels[i] == 1 ? 1 : -1;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> margin(n, 0.0);
    const detail::SortedColumns cols(train.features);

    for (int k = 0; k < params_.rounds; ++k) {
        Stump stump;
        double eps = 0.0;
        if (!search(cols, signs, w, stump, eps)) {
            if (k == 0) throw TrainingError("adaboost: no valid stump (all features are constant)");
            break;
        }
        if (eps >= 0.5) break;  // no better than chance: discard and stop
        const bool perfect = eps < 1e-10;
        const double beta = adaboost_beta(std::max(eps, 1e-10));
        stumps_.push_back(stump);
        betas_.push_back(beta);

        double sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const int g = stump.vote(train.features.row(i));
            w[i] *= std::exp(-beta * signs[i] * g);
            sum += w[i];
            margin[i] += beta * g;
            correct += ((margin[i] >= 0.0 ? 1 : -1) == signs[i]) ? 1 : 0;
        }
        double renormalized = 0.0;
        for (double& wi : w) {
            wi /= sum;
            renormalized += wi;
        }
        trace_.push_back({eps, beta, renormalized, static_cast<double>(correct) / static_cast<double>(n)});
        if (perfect) break;
    }
}

double AdaBoostModel::normalized_margin(std::span<const double> x) const {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < stumps_.size(); ++k) {
        num += betas_[k] * stumps_[k].vote(x);
        den += betas_[k];
    }
    return den > 0.0 ? num / den : 0.0;
}

std::vector<double> AdaBoostModel::predict_proba(const Matrix& x) const {
    if (inputs_ == 0) throw TrainingError("adaboost: model is not fitted");
    detail::require_dims(x, inputs_, kind());
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(2.0 * normalized_margin(x.row(r)));
    return out;
}

nlohmann::json AdaBoostModel::to_json() const {
    auto doc = detail::model_header(kind());
    doc["hyperparameters"] = {{"rounds", params_.rounds}};
    doc["n_features"] = inputs_;
    nlohmann::json stumps = nlohmann::json::array();
    for (std::size_t k = 0; k < stumps_.size(); ++k) {
        stumps.push_back({{"feature", stumps_[k].feature},
                          {"threshold", detail::encode_double(stumps_[k].threshold)},
                          {"polarity", stumps_[k].polarity},
                          {"beta", detail::encode_double(betas_[k])}});
    }
    doc["stumps"] = stumps;
    return doc;
}

std::unique_ptr<AdaBoostModel> AdaBoostModel::from_json(const nlohmann::json& doc) {
    detail::check_model_header(doc, "adaboost");
    AdaBoostParams p;
    p.rounds = doc.at("hyperparameters").at("rounds").get<int>();
    auto m = std::make_unique<AdaBoostModel>(p);
    m->inputs_ = doc.at("n_features").get<std::size_t>();
    for (const auto& s : doc.at("stumps")) {
        Stump stump;
        stump.feature = s.at("feature").get<std::size_t>();
        stump.threshold = detail::decode_double(s.at("threshold"));
        stump.polarity = s.at("polarity").get<int>();
        if (stump.feature >= m->inputs_) throw SchemaError("adaboost: stump feature out of range");
        m->stumps_.push_back(stump);
        m->betas_.push_back(detail::decode_double(s.at("beta")));
    }
    return m;
}

}  // namespace stackline
