#include <algorithm>
#include <cmath>
#include <numeric>

#include "stackline/learners.hpp"

namespace stackline {

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("distance between vectors of different length");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void KnnModel::fit(const LabeledSet& train, std::uint64_t /*seed*/) {
    detail::require_fit_input(train, kind(), false);
    if (static_cast<std::size_t>(params_.k) > train.size()) {
        throw ConfigError("knn: k=" + std::to_string(params_.k) + " exceeds training size " +
                          std::to_string(train.size()));
    }
    x_ = train.features;
    y_ = train.labels;
}

double KnnModel::predict_proba_one(std::span<const double> query) const {
    if (y_.empty()) throw TrainingError("knn: model is not fitted");
    if (query.size() != x_.cols()) {
        throw ShapeError("knn: expected " + std::to_string(x_.cols()) + " features, got " +
                         std::to_string(query.size()));
    }
    // Squared distance orders the same as distance.
    std::vector<std::pair<double, std::size_t>> dist(x_.rows());
    for (std::size_t i = 0; i < x_.rows(); ++i) {
        auto row = x_.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j) {
            const double d = row[j] - query[j];
            s += d * d;
        }
        dist[i] = {s, i};
    }
    const auto k = static_cast<std::size_t>(params_.k);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    int positives = 0;
    for (std::size_t i = 0; i < k; ++i) positives += y_[dist[i].second];
    return static_cast<double>(positives) / static_cast<double>(k);
}

std::vector<double> KnnModel::predict_proba(const Matrix& x) const {
    detail::require_dims(x, x_.cols(), kind());
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_proba_one(x.row(r));
    return out;
}

nlohmann::json KnnModel::to_json() const {
    auto doc = detail::model_header(kind());
    doc["hyperparameters"] = {{"k", params_.k}};
    doc["n_features"] = x_.cols();
    doc["train_features"] = detail::encode_doubles(x_.data());
    doc["train_labels"] = y_;
    return doc;
}

std::unique_ptr<KnnModel> KnnModel::from_json(const nlohmann::json& doc) {
    detail::check_model_header(doc, "knn");
    KnnParams p;
    p.k = doc.at("hyperparameters").at("k").get<int>();
    auto m = std::make_unique<KnnModel>(p);
    const auto cols = doc.at("n_features").get<std::size_t>();
    auto data = detail::decode_doubles(doc.at("train_features"));
    m->y_ = doc.at("train_labels").get<std::vector<int>>();
    m->x_ = Matrix(m->y_.size(), cols, std::move(data));
    return m;
}

}  // namespace stackline
