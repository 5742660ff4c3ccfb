// stackline: command-line driver for the preprocessing, selection, stacking
// and evaluation pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stackline/error.hpp"
#include "stackline/pipeline.hpp"
#include "stackline/synth.hpp"

namespace fs = std::filesystem;
using namespace stackline;

namespace {

struct ConfigArgs {
    std::string path;
    std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("-c,--config", args.path, "pipeline config (JSON)");
    cmd->add_option("--set", args.overrides, "override a config field, e.g. stacking.n_folds=10")
        ->take_all();
}

PipelineConfig load_config(const ConfigArgs& args) {
    if (args.path.empty()) return PipelineConfig::from_json(nlohmann::json::object(), args.overrides);
    return PipelineConfig::load(args.path, args.overrides);
}

void print_preprocess(const PreprocessOutcome& p) {
    const auto& c = p.clean;
    std::printf("raw                %zu x %zu\n", c.raw.rows, c.raw.cols);
    std::printf("after drop list    %zu x %zu\n", c.after_drop_columns.rows, c.after_drop_columns.cols);
    std::printf("after null columns %zu x %zu\n", c.after_null_columns.rows, c.after_null_columns.cols);
    std::printf("after row removal  %zu x %zu\n", c.after_drop_rows.rows, c.after_drop_rows.cols);
    std::printf("split              train %zu (balanced %zu), test %zu, val %zu\n",
                p.train_rows_before_balance, p.train_rows, p.test_rows, p.val_rows);
    for (const auto& w : p.encoder.warnings) std::printf("warning: %s\n", w.c_str());
}

void print_select(const SelectOutcome& s, double alpha) {
    std::printf("%-32s %12s %4s %12s %s\n", "feature", "statistic", "dof", "p_value", "kept");
    for (const auto& r : s.selection.results) {
        std::printf("%-32s %12.4f %4d %12.4g %s\n", r.feature_name.c_str(), r.statistic, r.dof, r.p_value,
                    r.kept ? "yes" : "no");
    }
    std::printf("%zu of %zu features kept at alpha %g\n", s.selection.kept.size(), s.selection.results.size(),
                alpha);
}

void print_report(const EvalReport& r) {
    const auto& m = r.metrics;
    std::printf("%s on %s: acc %.4f  prec %.4f  recall %.4f  f1 %.4f (weighted)  auc %.4f\n", r.model.c_str(),
                r.split.c_str(), m.accuracy.weighted, m.precision.weighted, m.recall.weighted, m.f1.weighted,
                r.roc.auc);
    std::printf("confusion: tp %lld  fp %lld  fn %lld  tn %lld\n", static_cast<long long>(r.matrix.tp),
                static_cast<long long>(r.matrix.fp), static_cast<long long>(r.matrix.fn),
                static_cast<long long>(r.matrix.tn));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stackline: chi-square feature selection and stacked ensembles for tabular data"};
    app.require_subcommand(1);

    ConfigArgs pre_args, sel_args, train_args, eval_args, cmp_args;
    auto* pre = app.add_subcommand("preprocess", "clean, split, balance and encode the input CSV");
    add_config_options(pre, pre_args);
    auto* sel = app.add_subcommand("select", "chi-square feature selection on the training split");
    add_config_options(sel, sel_args);
    auto* train = app.add_subcommand("train", "fit the stacked ensemble on the selected features");
    add_config_options(train, train_args);

    auto* eval = app.add_subcommand("evaluate", "score a stacked model on one split");
    add_config_options(eval, eval_args);
    std::string eval_model;
    std::string eval_split = "test";
    eval->add_option("--model", eval_model, "model file (default: <output_dir>/model.json)");
    eval->add_option("--split", eval_split, "train, test or val")->check(CLI::IsMember({"train", "test", "val"}));

    auto* cmp = app.add_subcommand("compare", "train all single models and the stack, tabulate test scores");
    add_config_options(cmp, cmp_args);
    std::string paper_data;
    cmp->add_option("--paper-data", paper_data, "run every stage on this survey CSV before comparing");

    auto* pred = app.add_subcommand("predict", "append proba and label columns to a CSV");
    std::string pred_model, pred_input, pred_output;
    bool pred_encoded = false;
    pred->add_option("--model", pred_model, "model file")->required();
    pred->add_option("--input", pred_input, "input CSV")->required();
    pred->add_option("--output", pred_output, "output CSV")->required();
    pred->add_flag("--encoded", pred_encoded, "input is already encoded (a split CSV)");

    auto* syn = app.add_subcommand("synth", "write a seeded synthetic survey CSV");
    ConfigArgs syn_args;
    add_config_options(syn, syn_args);
    std::string syn_output;
    std::optional<std::size_t> syn_rows, syn_informative, syn_noise;
    std::optional<double> syn_balance, syn_missing;
    std::optional<std::uint64_t> syn_seed;
    syn->add_option("-o,--output", syn_output, "output CSV")->required();
    syn->add_option("--rows", syn_rows, "number of rows");
    syn->add_option("--balance", syn_balance, "fraction of positive rows");
    syn->add_option("--informative", syn_informative, "informative numeric features");
    syn->add_option("--noise", syn_noise, "noise numeric features");
    syn->add_option("--missing-rate", syn_missing, "probability a cell is blanked");
    syn->add_option("--seed", syn_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*pre) {
            print_preprocess(run_preprocess(load_config(pre_args)));
        } else if (*sel) {
            const auto cfg = load_config(sel_args);
            print_select(run_select(cfg), cfg.alpha);
        } else if (*train) {
            const auto cfg = load_config(train_args);
            const auto out = run_train(cfg);
            std::printf("model written to %s\n", (cfg.output_dir / "model.json").string().c_str());
            std::printf("base learners:");
            for (const auto& b : out.model.base_learners()) std::printf(" %s", b->kind().c_str());
            std::printf("\n");
        } else if (*eval) {
            const auto cfg = load_config(eval_args);
            const fs::path model = eval_model.empty() ? cfg.output_dir / "model.json" : fs::path(eval_model);
            const auto out = run_evaluate(cfg, model, eval_split);
            print_report(out.report);
            for (const auto& b : out.base_reports) print_report(b);
        } else if (*cmp) {
            auto args = cmp_args;
            if (!paper_data.empty()) {
                args.overrides.push_back("input=" + nlohmann::json(paper_data).dump());
                const auto cfg = load_config(args);
                const auto run = run_all(cfg);
                print_preprocess(run.preprocess);
                std::printf("\n");
                print_select(run.select, cfg.alpha);
                std::printf("\n");
                print_report(run.evaluate.report);
                std::printf("\n%s", comparison_text(run.compare.rows).c_str());
            } else {
                std::printf("%s", comparison_text(run_compare(load_config(args)).rows).c_str());
            }
        } else if (*pred) {
            const Frame out = run_predict(pred_model, pred_input, pred_output, pred_encoded);
            std::printf("%zu rows written to %s\n", out.n_rows(), pred_output.c_str());
        } else if (*syn) {
            SynthConfig sc = load_config(syn_args).synth;
            if (syn_rows) sc.n_rows = *syn_rows;
            if (syn_balance) sc.class_balance = *syn_balance;
            if (syn_informative) sc.informative_features = *syn_informative;
            if (syn_noise) sc.noise_features = *syn_noise;
            if (syn_missing) sc.missing_rate = *syn_missing;
            if (syn_seed) sc.seed = *syn_seed;
            const Frame frame = generate(sc);
            const fs::path out(syn_output);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            write_csv(out, frame);
            std::printf("%zu rows x %zu columns written to %s\n", frame.n_rows(), frame.n_cols(),
                        syn_output.c_str());
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
