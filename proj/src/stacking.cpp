#include "stackline/stacking.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <numeric>

#include "stackline/parallel.hpp"
#include "stackline/rng.hpp"

namespace stackline {

nlohmann::json StackingConfig::to_json() const {
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& b : base_learners) bases.push_back({{"kind", b.kind}, {"params", b.params}});
    return {{"base_learners", bases},
            {"n_folds", n_folds},
            {"seed", seed},
            {"meta", {{"learning_rate", detail::encode_double(meta.learning_rate)},
                      {"epochs", meta.epochs}}}};
}

StackingConfig StackingConfig::from_json(const nlohmann::json& doc) {
    StackingConfig cfg;
    cfg.base_learners.clear();
    for (const auto& b : doc.at("base_learners")) {
        cfg.base_learners.push_back({b.at("kind").get<std::string>(),
                                     b.value("params", nlohmann::json::object())});
    }
    cfg.n_folds = doc.at("n_folds").get<int>();
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.meta.learning_rate = detail::decode_double(doc.at("meta").at("learning_rate"));
    cfg.meta.epochs = doc.at("meta").at("epochs").get<int>();
    return cfg;
}

std::uint64_t derive_seed(std::uint64_t seed, std::size_t learner_index, std::size_t fold_index) {
    return seed + static_cast<std::uint64_t>(learner_index) * 1000u + static_cast<std::uint64_t>(fold_index);
}

std::vector<int> stratified_folds(std::span<const int> labels, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw ConfigError("n_folds must be at least 2");
    if (static_cast<std::size_t>(n_folds) > labels.size()) {
        throw ConfigError("n_folds (" + std::to_string(n_folds) + ") exceeds training rows (" +
                          std::to_string(labels.size()) + ")");
    }
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
    Rng rng(seed);
    rng.shuffle(std::span(neg));
    rng.shuffle(std::span(pos));

    std::vector<int> fold(labels.size(), -1);
    std::size_t dealt = 0;
    for (auto* group : {&neg, &pos}) {
        for (std::size_t i : *group) fold[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(n_folds));
    }
    for (int f = 0; f < n_folds; ++f) {
        bool has[2] = {false, false};
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (fold[i] == f) has[labels[i]] = true;
        }
        if (!has[0] || !has[1]) {
            throw StratificationError("fold " + std::to_string(f) + " lacks class " +
                                      std::to_string(has[0] ? 1 : 0) + "; use fewer folds");
        }
    }
    return fold;
}

namespace {

[[noreturn]] void rethrow_with_context(const std::string& learner, std::size_t index, const std::string& where,
                                       const std::exception& e) {
    throw TrainingError("base learner '" + learner + "' (index " + std::to_string(index) + "), " + where +
                        ": " + e.what());
}

std::string learner_label(const LearnerFactory& factory) {
    try {
        return factory()->kind();
    } catch (...) {
        return "?";
    }
}

}  // namespace

MetaFeatures build_meta_features(const LabeledSet& train, const std::vector<LearnerFactory>& learners,
                                 int n_folds, std::uint64_t seed) {
    if (learners.empty()) throw ConfigError("stacking needs at least one base learner");
    MetaFeatures out;
    out.fold_of_row = stratified_folds(train.labels, n_folds, seed);
    const std::size_t n = train.size();
    const std::size_t r_count = learners.size();
    out.values = Matrix(n, r_count, 0.0);

    std::vector<std::vector<std::size_t>> in_fold(static_cast<std::size_t>(n_folds));
    std::vector<std::vector<std::size_t>> out_fold(static_cast<std::size_t>(n_folds));
    for (std::size_t i = 0; i < n; ++i) {
        for (int f = 0; f < n_folds; ++f) {
            (out.fold_of_row[i] == f ? in_fold : out_fold)[static_cast<std::size_t>(f)].push_back(i);
        }
    }

    // One task per (fold, learner); each writes a disjoint block of cells.
    const std::size_t tasks = static_cast<std::size_t>(n_folds) * r_count;
    parallel_for(tasks, [&](std::size_t t) {
        const std::size_t f = t / r_count;
        const std::size_t r = t % r_count;
        LearnerPtr learner;
        try {
            learner = learners[r]();
            learner->fit(train.take_rows(out_fold[f]), derive_seed(seed, r, f));
            const Matrix held_out = train.features.take_rows(in_fold[f]);
            const auto proba = learner->predict_proba(held_out);
            for (std::size_t k = 0; k < in_fold[f].size(); ++k) out.values(in_fold[f][k], r) = proba[k];
        } catch (const Error& e) {
            rethrow_with_context(learner ? learner->kind() : learner_label(learners[r]), r,
                                 "fold " + std::to_string(f), e);
        }
    });
    return out;
}

std::vector<LearnerFactory> factories_for(const std::vector<LearnerSpec>& specs) {
    std::vector<LearnerFactory> out;
    for (const auto& spec : specs) {
        make_learner(spec.kind, spec.params);  // validate eagerly
        out.push_back([spec] { return make_learner(spec.kind, spec.params); });
    }
    return out;
}

MetaFeatures build_meta_features(const LabeledSet& train, const StackingConfig& cfg) {
    return build_meta_features(train, factories_for(cfg.base_learners), cfg.n_folds, cfg.seed);
}

StackingModel stack_fit(const LabeledSet& train, const StackingConfig& cfg,
                        const std::vector<LearnerFactory>& learners) {
    if (learners.size() < 2) throw ConfigError("stacking needs at least two base learners");
    MetaFeatures meta = build_meta_features(train, learners, cfg.n_folds, cfg.seed);

    StackingModel model;
    model.config_ = cfg;
    model.folds_ = std::move(meta.fold_of_row);
    model.feature_names_ = train.feature_names;

    std::vector<std::string> meta_names;
    for (std::size_t r = 0; r < learners.size(); ++r) meta_names.push_back("base_" + std::to_string(r));
    const LabeledSet meta_set(std::move(meta.values), train.labels, meta_names);
    model.meta_ = LogRegModel(cfg.meta);
    model.meta_.fit(meta_set, cfg.seed);

    model.bases_.resize(learners.size());
    const auto full_fold = static_cast<std::size_t>(cfg.n_folds);
    parallel_for(learners.size(), [&](std::size_t r) {
        LearnerPtr learner;
        try {
            learner = learners[r]();
            learner->fit(train, derive_seed(cfg.seed, r, full_fold));
        } catch (const Error& e) {
            rethrow_with_context(learner ? learner->kind() : "?", r, "full refit", e);
        }
        model.bases_[r] = std::move(learner);
    });
    return model;
}

StackingModel stack_fit(const LabeledSet& train, const StackingConfig& cfg) {
    return stack_fit(train, cfg, factories_for(cfg.base_learners));
}

Matrix StackingModel::base_probabilities(const Matrix& x) const {
    if (x.rows() > 0 && x.cols() != feature_names_.size()) {
        throw ShapeError("stacking: expected " + std::to_string(feature_names_.size()) +
                         " features, got " + std::to_string(x.cols()));
    }
    Matrix out(x.rows(), bases_.size());
    for (std::size_t r = 0; r < bases_.size(); ++r) {
        const auto p = bases_[r]->predict_proba(x);
        for (std::size_t i = 0; i < x.rows(); ++i) out(i, r) = p[i];
    }
    return out;
}

std::vector<double> StackingModel::predict_proba(const Matrix& x) const {
    return meta_.predict_proba(base_probabilities(x));
}

std::vector<int> StackingModel::predict(const Matrix& x) const {
    return meta_.predict(base_probabilities(x));
}

std::string json_digest(const nlohmann::json& doc) {
    const std::string text = doc.dump();
    unsigned char hash[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), hash, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", hash[i]);
        hex += buf;
    }
    return hex;
}

nlohmann::json StackingModel::to_json() const {
    nlohmann::json doc;
    doc["format"] = "stackline.stacking";
    doc["version"] = 1;
    const auto cfg = config_.to_json();
    doc["config"] = cfg;
    doc["config_digest"] = json_digest(cfg);
    doc["feature_names"] = feature_names_;
    doc["fold_assignment"] = folds_;
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& b : bases_) bases.push_back(b->to_json());
    doc["base_models"] = bases;
    doc["meta_model"] = meta_.to_json();
    if (!encoder.is_null()) doc["encoder"] = encoder;
    return doc;
}

StackingModel StackingModel::from_json(const nlohmann::json& doc) {
    if (doc.value("format", "") != "stackline.stacking") throw SchemaError("not a stacking model document");
    if (doc.value("version", 0) != 1) throw SchemaError("unsupported stacking model version");
    StackingModel m;
    try {
        m.config_ = StackingConfig::from_json(doc.at("config"));
        m.feature_names_ = doc.at("feature_names").get<std::vector<std::string>>();
        m.folds_ = doc.at("fold_assignment").get<std::vector<int>>();
        for (const auto& b : doc.at("base_models")) m.bases_.push_back(learner_from_json(b));
        auto meta = LogRegModel::from_json(doc.at("meta_model"));
        m.meta_ = *meta;
        if (doc.contains("encoder")) m.encoder = doc.at("encoder");
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed stacking model document: ") + e.what());
    }
    if (m.meta_.weights().size() != m.bases_.size()) {
        throw SchemaError("meta-learner input size does not match base-learner count");
    }
    return m;
}

}  // namespace stackline
