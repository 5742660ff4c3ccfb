#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "stackline/chi2.hpp"
#include "stackline/error.hpp"
#include "stackline/frame.hpp"
#include "stackline/learners.hpp"
#include "stackline/metrics.hpp"
#include "stackline/pipeline.hpp"
#include "stackline/stacking.hpp"
#include "stackline/synth.hpp"

namespace py = pybind11;
using namespace stackline;

namespace pybind11::detail {
template <>
struct is_copy_constructible<StackingModel> : std::false_type {};
}  // namespace pybind11::detail

namespace {

using Rows = std::vector<std::vector<double>>;

Matrix to_matrix(const Rows& rows) {
    if (rows.empty()) return Matrix();
    const std::size_t cols = rows.front().size();
    Matrix out(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw ShapeError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                             " values, expected " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = rows[r][c];
    }
    return out;
}

LabeledSet to_set(const Rows& x, std::vector<int> y) {
    Matrix m = to_matrix(x);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < m.cols(); ++c) names.push_back("x" + std::to_string(c));
    return LabeledSet(std::move(m), std::move(y), std::move(names));
}

nlohmann::json parse(const std::string& text) {
    if (text.empty()) return nlohmann::json::object();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

PipelineConfig config_from(const std::string& doc, const std::vector<std::string>& overrides) {
    return PipelineConfig::from_json(parse(doc), overrides);
}

std::string manifest_text(const RunManifest& m, const PipelineConfig& cfg) {
    return m.to_json(cfg.output_dir).dump();
}

py::dict triple(const MetricTriple& t) {
    py::dict d;
    d["binary"] = t.binary;
    d["macro"] = t.macro;
    d["weighted"] = t.weighted;
    return d;
}

/// Fitted single learner held by the Python object.
class PyLearner {
public:
    PyLearner(const std::string& kind, const std::string& params)
        : learner_(make_learner(kind, parse(params))) {}

    void fit(const Rows& x, std::vector<int> y, std::uint64_t seed) {
        learner_->fit(to_set(x, std::move(y)), seed);
    }
    std::vector<double> predict_proba(const Rows& x) const { return learner_->predict_proba(to_matrix(x)); }
    std::vector<int> predict(const Rows& x) const { return learner_->predict(to_matrix(x)); }
    std::string kind() const { return learner_->kind(); }
    std::string to_json() const { return learner_->to_json().dump(); }

private:
    LearnerPtr learner_;
};

}  // namespace

PYBIND11_MODULE(_stackline, m) {
    m.doc() = "Stacked ensemble classification toolkit.";

    auto base = py::register_exception<Error>(m, "StacklineError");
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<SchemaError>(m, "SchemaError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<BalanceError>(m, "BalanceError", base);
    py::register_exception<PipelineError>(m, "PipelineError", base);
    py::register_exception<StatError>(m, "StatError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<ShapeError>(m, "ShapeError", base);
    py::register_exception<DivergenceError>(m, "DivergenceError", base);
    py::register_exception<TrainingError>(m, "TrainingError", base);
    py::register_exception<SelectionError>(m, "SelectionError", base);
    py::register_exception<StratificationError>(m, "StratificationError", base);

    m.def("regularized_gamma_p", &regularized_gamma_p, py::arg("a"), py::arg("x"),
          "Regularized lower incomplete gamma P(a, x).");
    m.def("regularized_gamma_q", &regularized_gamma_q, py::arg("a"), py::arg("x"),
          "Regularized upper incomplete gamma Q(a, x).");
    m.def("chi2_sf", &chi2_sf, py::arg("statistic"), py::arg("dof"),
          "Upper tail probability of the chi-square distribution.");
    m.def(
        "chi_square",
        [](std::vector<std::vector<std::int64_t>> counts) {
            auto table = ContingencyTable::from_counts(std::move(counts));
            auto s = chi_square_statistic(table);
            return py::make_tuple(s.statistic, s.dof, chi2_sf(s.statistic, s.dof));
        },
        py::arg("counts"), "Pearson test on a contingency table: (statistic, dof, p_value).");

    m.def(
        "scores",
        [](const std::vector<int>& labels, const std::vector<int>& predictions) {
            auto s = scores(confusion(labels, predictions));
            py::dict d;
            d["accuracy"] = triple(s.accuracy);
            d["precision"] = triple(s.precision);
            d["recall"] = triple(s.recall);
            d["f1"] = triple(s.f1);
            return d;
        },
        py::arg("labels"), py::arg("predictions"),
        "Accuracy, precision, recall and F1 as binary, macro and weighted averages.");
    m.def(
        "roc_auc",
        [](const std::vector<int>& labels, const std::vector<double>& proba) {
            auto curve = roc_auc(labels, proba);
            std::vector<std::pair<double, double>> points;
            for (const auto& p : curve.points) points.emplace_back(p.fpr, p.tpr);
            return py::make_tuple(points, curve.auc);
        },
        py::arg("labels"), py::arg("proba"), "ROC points as (fpr, tpr) pairs and the trapezoidal AUC.");

    m.def(
        "generate_synth",
        [](const std::string& path, const std::string& config) {
            Frame frame = generate(SynthConfig::from_json(parse(config)));
            write_csv(std::filesystem::path(path), frame);
            return py::make_tuple(frame.n_rows(), frame.n_cols());
        },
        py::arg("path"), py::arg("config") = "",
        "Writes a synthetic survey table to CSV and returns its (rows, columns).");
    m.def(
        "csv_shape",
        [](const std::string& path) {
            Frame frame = read_csv(path);
            return py::make_tuple(frame.n_rows(), frame.n_cols(), frame.column_names());
        },
        py::arg("path"), "Reads a CSV file and returns (rows, columns, names).");

    py::class_<PyLearner>(m, "Learner")
        .def(py::init<const std::string&, const std::string&>(), py::arg("kind"), py::arg("params") = "")
        .def("fit", &PyLearner::fit, py::arg("x"), py::arg("y"), py::arg("seed") = 42)
        .def("predict_proba", &PyLearner::predict_proba, py::arg("x"))
        .def("predict", &PyLearner::predict, py::arg("x"))
        .def("to_json", &PyLearner::to_json)
        .def_property_readonly("kind", &PyLearner::kind);
    m.def("learner_kinds", &learner_kinds, "Type tags accepted by Learner.");

    py::class_<StackingModel>(m, "StackingModel")
        .def("predict_proba", [](const StackingModel& s, const Rows& x) { return s.predict_proba(to_matrix(x)); },
             py::arg("x"))
        .def("predict", [](const StackingModel& s, const Rows& x) { return s.predict(to_matrix(x)); }, py::arg("x"))
        .def("meta_weights", [](const StackingModel& s) { return s.meta().weights(); })
        .def("meta_bias", [](const StackingModel& s) { return s.meta().bias(); })
        .def("to_json", [](const StackingModel& s) { return s.to_json().dump(); });
    m.def(
        "stack_fit",
        [](const Rows& x, std::vector<int> y, const std::string& config) {
            auto doc = StackingConfig{}.to_json();
            doc.merge_patch(parse(config));
            StackingConfig cfg;
            try {
                cfg = StackingConfig::from_json(doc);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("invalid stacking config: ") + e.what());
            }
            return stack_fit(to_set(x, std::move(y)), cfg);
        },
        py::arg("x"), py::arg("y"), py::arg("config") = "",
        "Fits base learners out of fold and a logistic meta-learner over their probabilities.");
    m.def(
        "load_model", [](const std::string& path) { return StackingModel::from_json(parse(read_text(path))); },
        py::arg("path"), "Loads a stacked model written by the train command.");

    m.def(
        "default_config", []() { return PipelineConfig::default_document().dump(); },
        "Default pipeline configuration as JSON text.");
    m.def(
        "resolve_config",
        [](const std::string& doc, const std::vector<std::string>& overrides) {
            return config_from(doc, overrides).document.dump();
        },
        py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{},
        "Merged and validated configuration as JSON text.");

    m.def(
        "run_preprocess",
        [](const std::string& doc, const std::vector<std::string>& overrides) {
            auto cfg = config_from(doc, overrides);
            return manifest_text(run_preprocess(cfg).manifest, cfg);
        },
        py::arg("config"), py::arg("overrides") = std::vector<std::string>{}, "Runs preprocessing; returns the manifest.");
    m.def(
        "run_select",
        [](const std::string& doc, const std::vector<std::string>& overrides) {
            auto cfg = config_from(doc, overrides);
            return manifest_text(run_select(cfg).manifest, cfg);
        },
        py::arg("config"), py::arg("overrides") = std::vector<std::string>{}, "Runs feature selection; returns the manifest.");
    m.def(
        "run_train",
        [](const std::string& doc, const std::vector<std::string>& overrides) {
            auto cfg = config_from(doc, overrides);
            return manifest_text(run_train(cfg).manifest, cfg);
        },
        py::arg("config"), py::arg("overrides") = std::vector<std::string>{}, "Trains the stack; returns the manifest.");
    m.def(
        "run_evaluate",
        [](const std::string& doc, const std::string& model, const std::string& split,
           const std::vector<std::string>& overrides) {
            auto cfg = config_from(doc, overrides);
            return run_evaluate(cfg, model, split).report.to_json().dump();
        },
        py::arg("config"), py::arg("model"), py::arg("split") = "test",
        py::arg("overrides") = std::vector<std::string>{}, "Evaluates a model on a split; returns the report.");
    m.def(
        "run_compare",
        [](const std::string& doc, const std::vector<std::string>& overrides) {
            auto cfg = config_from(doc, overrides);
            return comparison_csv(run_compare(cfg).rows);
        },
        py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
        "Trains every single model and the stack; returns the comparison CSV.");
    m.def(
        "run_predict",
        [](const std::string& model, const std::string& input, const std::string& output, bool encoded) {
            return run_predict(model, input, output, encoded).n_rows();
        },
        py::arg("model"), py::arg("input"), py::arg("output"), py::arg("encoded") = false,
        "Writes input rows with proba and label columns; returns the row count.");

    m.attr("__version__") = "0.1.0";
}
