#include <cmath>
#include <cstdio>

#include "stackline/learners.hpp"

namespace stackline {

double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double bce_from_logits(std::span<const double> logits, std::span<const int> targets) {
    if (logits.size() != targets.size()) throw ShapeError("logits and targets differ in length");
    if (logits.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double z = logits[i];
        // softplus(z) = log(1 + e^z), split by sign to stay finite.
        const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        total += softplus - targets[i] * z;
    }
    return total / static_cast<double>(logits.size());
}

std::vector<int> Learner::predict(const Matrix& x) const {
    const auto proba = predict_proba(x);
    std::vector<int> out(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) out[i] = proba[i] >= 0.5 ? 1 : 0;
    return out;
}

namespace detail {

std::string encode_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double decode_double(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    const double out = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw SchemaError("bad numeric text '" + s + "'");
    return out;
}

nlohmann::json encode_doubles(std::span<const double> values) {
    nlohmann::json out = nlohmann::json::array();
    for (double v : values) out.push_back(encode_double(v));
    return out;
}

std::vector<double> decode_doubles(const nlohmann::json& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(decode_double(v));
    return out;
}

nlohmann::json model_header(const std::string& kind) {
    nlohmann::json doc;
    doc["format"] = "stackline.model";
    doc["version"] = 1;
    doc["type"] = kind;
    return doc;
}

void check_model_header(const nlohmann::json& doc, const std::string& kind) {
    if (doc.value("format", "") != "stackline.model") throw SchemaError("not a model document");
    if (doc.value("version", 0) != 1) throw SchemaError("unsupported model document version");
    if (doc.value("type", "") != kind) {
        throw SchemaError("model type '" + doc.value("type", "") + "' where '" + kind + "' expected");
    }
}

void require_fit_input(const LabeledSet& train, const std::string& kind, bool both_classes) {
    if (train.size() == 0) throw TrainingError(kind + ": empty training set");
    if (train.dims() == 0) throw TrainingError(kind + ": training set has no features");
    for (double v : train.features.data()) {
        if (!std::isfinite(v)) throw TrainingError(kind + ": non-finite feature value");
    }
    if (both_classes) {
        const std::size_t pos = train.count(1);
        if (pos == 0 || pos == train.size()) {
            throw TrainingError(kind + ": training labels contain a single class");
        }
    }
}

void require_dims(const Matrix& x, std::size_t expected, const std::string& kind) {
    if (x.rows() > 0 && x.cols() != expected) {
        throw ShapeError(kind + ": expected " + std::to_string(expected) + " features, got " +
                         std::to_string(x.cols()));
    }
}

}  // namespace detail

LearnerPtr make_learner(const std::string& kind, const nlohmann::json& params) {
    const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
    auto known = [&](std::initializer_list<const char*> keys) {
        for (const auto& [key, value] : p.items()) {
            bool ok = false;
            for (const char* k : keys) ok = ok || key == k;
            if (!ok) throw ConfigError("unknown hyperparameter '" + key + "' for learner '" + kind + "'");
        }
    };
    try {
        if (kind == "knn") {
            known({"k"});
            KnnParams kp;
            kp.k = p.value("k", kp.k);
            if (kp.k < 1) throw ConfigError("knn: k must be >= 1");
            return std::make_unique<KnnModel>(kp);
        }
        if (kind == "svm") {
            known({"lambda", "epochs"});
            SvmParams sp;
            sp.lambda = p.value("lambda", sp.lambda);
            sp.epochs = p.value("epochs", sp.epochs);
            if (!(sp.lambda > 0.0)) throw ConfigError("svm: lambda must be > 0");
            if (sp.epochs < 1) throw ConfigError("svm: epochs must be >= 1");
            return std::make_unique<SvmModel>(sp);
        }
        if (kind == "mlp") {
            known({"hidden_units", "learning_rate", "epochs"});
            MlpParams mp;
            mp.hidden_units = p.value("hidden_units", mp.hidden_units);
            mp.learning_rate = p.value("learning_rate", mp.learning_rate);
            mp.epochs = p.value("epochs", mp.epochs);
            if (mp.hidden_units < 1) throw ConfigError("mlp: hidden_units must be >= 1");
            if (!(mp.learning_rate > 0.0)) throw ConfigError("mlp: learning_rate must be > 0");
            if (mp.epochs < 0) throw ConfigError("mlp: epochs must be >= 0");
            return std::make_unique<MlpModel>(mp);
        }
        if (kind == "adaboost") {
            known({"rounds"});
            AdaBoostParams ap;
            ap.rounds = p.value("rounds", ap.rounds);
            if (ap.rounds < 1) throw ConfigError("adaboost: rounds must be >= 1");
            return std::make_unique<AdaBoostModel>(ap);
        }
        if (kind == "logreg") {
            known({"learning_rate", "epochs"});
            LogRegParams lp;
            lp.learning_rate = p.value("learning_rate", lp.learning_rate);
            lp.epochs = p.value("epochs", lp.epochs);
            if (!(lp.learning_rate > 0.0)) throw ConfigError("logreg: learning_rate must be > 0");
            if (lp.epochs < 0) throw ConfigError("logreg: epochs must be >= 0");
            return std::make_unique<LogRegModel>(lp);
        }
        if (kind == "nb") {
            known({"var_floor"});
            NaiveBayesParams np;
            np.var_floor = p.value("var_floor", np.var_floor);
            if (!(np.var_floor > 0.0)) throw ConfigError("nb: var_floor must be > 0");
            return std::make_unique<NaiveBayesModel>(np);
        }
        if (kind == "gboost") {
            known({"rounds", "shrinkage"});
            GradBoostParams gp;
            gp.rounds = p.value("rounds", gp.rounds);
            gp.shrinkage = p.value("shrinkage", gp.shrinkage);
            if (gp.rounds < 1) throw ConfigError("gboost: rounds must be >= 1");
            if (!(gp.shrinkage > 0.0)) throw ConfigError("gboost: shrinkage must be > 0");
            return std::make_unique<GradBoostModel>(gp);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("learner '" + kind + "': bad hyperparameter value (" + e.what() + ")");
    }
    throw ConfigError("unknown learner '" + kind + "'");
}

LearnerPtr learner_from_json(const nlohmann::json& doc) {
    const std::string type = doc.value("type", "");
    try {
        if (type == "knn") return KnnModel::from_json(doc);
        if (type == "svm") return SvmModel::from_json(doc);
        if (type == "mlp") return MlpModel::from_json(doc);
        if (type == "adaboost") return AdaBoostModel::from_json(doc);
        if (type == "logreg") return LogRegModel::from_json(doc);
        if (type == "nb") return NaiveBayesModel::from_json(doc);
        if (type == "gboost") return GradBoostModel::from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("malformed '" + type + "' model document: " + e.what());
    }
    throw SchemaError("unknown model type '" + type + "'");
}

std::string display_name(const std::string& kind) {
    if (kind == "logreg") return "Logistic Regression";
    if (kind == "knn") return "K-Nearest Neighbors";
    if (kind == "svm") return "SVM";
    if (kind == "gboost") return "Gradient Boosting";
    if (kind == "adaboost") return "AdaBoost";
    if (kind == "nb") return "Naive Bayes";
    if (kind == "mlp") return "MLP Classifier";
    if (kind == "stacking") return "Stacking Ensemble";
    return kind;
}

const std::vector<std::string>& learner_kinds() {
    static const std::vector<std::string> kinds = {"logreg", "knn", "svm", "gboost",
                                                   "adaboost", "nb", "mlp"};
    return kinds;
}

}  // namespace stackline
