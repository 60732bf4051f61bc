// autoflow: AutoML workflow driver - setup, compare, create, tune, plot,
// predict - over the library's experiment engine.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "autoflow/analysis.hpp"
#include "autoflow/error.hpp"
#include "autoflow/experiment.hpp"
#include "autoflow/report.hpp"

namespace fs = std::filesystem;
using namespace autoflow;

namespace {

struct CommonOpts {
    std::string data;
    std::string target;
    std::string positive;
    std::string out = ".";
    std::uint64_t session_id = 123;
    std::size_t folds = 10;
    double train_size = 0.7;
    bool no_preprocess = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--data", o.data, "input CSV file")->required();
    cmd->add_option("--target", o.target, "target column name")->required();
    cmd->add_option("--positive", o.positive, "positive class label (default: greater label)");
    cmd->add_option("--session-id", o.session_id, "master seed (default 123)");
    cmd->add_option("--folds", o.folds, "cross-validation fold count (default 10)");
    cmd->add_option("--train-size", o.train_size, "train fraction (default 0.7)");
    cmd->add_option("--out", o.out, "output directory")->envname("AUTOFLOW_OUT");
    cmd->add_flag("--no-preprocess", o.no_preprocess, "skip imputation/encoding");
}

ExperimentConfig to_config(const CommonOpts& o) {
    ExperimentConfig cfg;
    cfg.session_id = o.session_id;
    cfg.target.column = o.target;
    if (!o.positive.empty()) cfg.target.positive_label = o.positive;
    cfg.train_size = o.train_size;
    cfg.fold_number = o.folds;
    cfg.preprocess = !o.no_preprocess;
    return cfg;
}

Experiment make_experiment(const CommonOpts& o) {
    const Table data = read_csv(o.data);
    return setup(data, to_config(o));
}

fs::path out_dir(const CommonOpts& o) {
    fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    f << content;
}

std::vector<ModelId> parse_id_list(const std::vector<std::string>& names) {
    std::vector<ModelId> ids;
    for (const std::string& n : names) ids.push_back(create_estimator(n).id);  // validates
    return ids;
}

int run_setup(const CommonOpts& o) {
    const Experiment exp = make_experiment(o);
    const std::string report = config_report_text(exp.report());
    std::cout << report;
    write_file(out_dir(o) / "config_report.txt", report);
    return 0;
}

int run_compare(const CommonOpts& o, const std::string& sort, std::size_t n_select,
                const std::vector<std::string>& include, const std::vector<std::string>& exclude) {
    const Experiment exp = make_experiment(o);
    CompareOptions opts;
    opts.sort = sort;
    opts.n_select = n_select;
    opts.include = parse_id_list(include);
    opts.exclude = parse_id_list(exclude);
    const CompareResult result = compare_models(exp, opts);

    std::cout << leaderboard_text(result.board, /*include_fit_time=*/true);
    const fs::path dir = out_dir(o);
    write_file(dir / "config_report.txt", config_report_text(exp.report()));
    write_file(dir / "leaderboard.txt", leaderboard_text(result.board, false));
    write_file(dir / "leaderboard.csv", leaderboard_csv(result.board));
    for (std::size_t i = 0; i < result.best.size(); ++i) {
        const std::string name = i == 0 ? "best_model.afpl"
                                        : "best_model_" + std::to_string(i + 1) + ".afpl";
        save_model(result.best[i], (dir / name).string(), false, &exp.config());
    }
    std::cout << "best: " << model_id_string(result.board.selected.front()) << "\n";
    return 0;
}

int run_create(const CommonOpts& o, const std::string& model) {
    const Experiment exp = make_experiment(o);
    const CreateResult result = create_model(exp, model);
    std::cout << cv_report_text(result.report);
    const fs::path dir = out_dir(o);
    write_file(dir / "config_report.txt", config_report_text(exp.report()));
    write_file(dir / ("cv_" + model + ".txt"), cv_report_text(result.report));
    write_file(dir / ("cv_" + model + ".csv"), cv_report_csv(result.report));
    save_model(result.pipeline, (dir / ("model_" + model + ".afpl")).string(), false,
               &exp.config());
    return 0;
}

int run_tune(const CommonOpts& o, const std::string& model, std::size_t iters) {
    const Experiment exp = make_experiment(o);
    const ModelId id = create_estimator(model).id;
    const TuneResult result = tune_model(exp, id, iters);
    std::cout << "chosen hyperparameters:";
    if (result.chosen.empty()) std::cout << " (documented defaults)";
    for (const auto& [k, v] : result.chosen) std::cout << " " << k << "=" << format_number(v);
    std::cout << "\n" << cv_report_text(result.report);
    const fs::path dir = out_dir(o);
    write_file(dir / ("cv_" + model + "_tuned.txt"), cv_report_text(result.report));
    write_file(dir / ("cv_" + model + "_tuned.csv"), cv_report_csv(result.report));
    save_model(result.pipeline, (dir / ("model_" + model + "_tuned.afpl")).string(), false,
               &exp.config());
    return 0;
}

int run_plot(const CommonOpts& o, const std::string& model, const std::string& kind) {
    const Experiment exp = make_experiment(o);
    const CreateResult created = create_model(exp, model);

    ChartSpec chart;
    if (kind == "gain") {
        const PredictResult pred = predict_model(exp, created.pipeline);
        if (!pred.scores)
            fail(ErrorCode::NoProbability,
                 "model produces no probability scores; gain chart unavailable");
        chart = gain_curve(exp.holdout_labels(), *pred.scores);
    } else if (kind == "learning") {
        const LearningCurve lc = learning_curve(exp, created.pipeline.model()->id());
        for (const std::string& w : lc.warnings) std::cerr << "warning: " << w << "\n";
        chart = lc.chart;
    } else if (kind == "feature") {
        chart = feature_importance(created.pipeline);
    } else {
        fail(ErrorCode::BadConfig, "unknown plot kind '" + kind + "'");
    }

    const fs::path dir = out_dir(o);
    const std::string stem = "chart_" + model + "_" + kind;
    render_svg(chart, (dir / (stem + ".svg")).string());
    render_csv(chart, (dir / (stem + ".csv")).string());
    std::cout << "wrote " << (dir / (stem + ".svg")).string() << "\n";
    return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& target_flag, const std::string& out) {
    const LoadedModel loaded = load_model(model_path);
    Table table = read_csv(data_path);

    std::string target = target_flag;
    if (target.empty() && loaded.has_config) target = loaded.config.target.column;

    std::optional<std::vector<int>> labels;
    Table features = table;
    if (!target.empty() && table.find_column(target)) {
        TargetSpec spec;
        spec.column = target;
        if (loaded.has_config && loaded.config.target.positive_label)
            spec.positive_label = loaded.config.target.positive_label;
        SplitXy sxy = split_xy(table, spec);
        labels = std::move(sxy.labels);
        features = std::move(sxy.features);
    }

    const std::vector<int> preds = loaded.pipeline.predict(features);
    std::optional<std::vector<double>> scores;
    if (loaded.pipeline.supports_proba()) scores = loaded.pipeline.predict_proba(features);

    std::vector<ColumnSchema> schema = {{"prediction", ColumnKind::Numeric}};
    std::vector<double> pred_values(preds.begin(), preds.end());
    std::vector<Column> cols = {Column::numeric(std::move(pred_values))};
    if (scores) {
        schema.push_back({"score", ColumnKind::Numeric});
        cols.push_back(Column::numeric(*scores));
    }
    const Table out_table(std::move(schema), std::move(cols));

    fs::path dir(out);
    fs::create_directories(dir);
    write_csv(out_table, (dir / "predictions.csv").string());
    std::cout << "wrote " << (dir / "predictions.csv").string() << "\n";

    if (labels) {
        const MetricRow row = evaluate_predictions(*labels, preds, scores ? &*scores : nullptr);
        TextTable t;
        t.header = {"Accuracy", "AUC", "Recall", "Prec.", "F1", "Kappa", "MCC"};
        t.rows.push_back({format_fixed(row.accuracy), format_fixed(row.auc),
                          format_fixed(row.recall), format_fixed(row.precision),
                          format_fixed(row.f1), format_fixed(row.kappa), format_fixed(row.mcc)});
        std::cout << render_text_table(t);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"autoflow: a self-contained AutoML workflow for binary classification"};
    app.require_subcommand(1);
    app.set_config("--config", "", "line-oriented `key = value` configuration file");
    app.allow_config_extras(false);

    CommonOpts setup_o, compare_o, create_o, tune_o, plot_o;

    CLI::App* cmd_setup = app.add_subcommand("setup", "split the data and report the configuration");
    add_common(cmd_setup, setup_o);

    CLI::App* cmd_compare = app.add_subcommand("compare", "cross-validate the model zoo and rank it");
    add_common(cmd_compare, compare_o);
    std::string sort = "accuracy";
    std::size_t n_select = 1;
    std::vector<std::string> include, exclude;
    cmd_compare->add_option("--sort", sort, "leaderboard metric (default accuracy)");
    cmd_compare->add_option("--n-select", n_select, "how many top models to keep (default 1)");
    cmd_compare->add_option("--include", include, "only these model ids")->delimiter(',');
    cmd_compare->add_option("--exclude", exclude, "skip these model ids")->delimiter(',');

    CLI::App* cmd_create = app.add_subcommand("create", "cross-validate and fit one model");
    add_common(cmd_create, create_o);
    std::string create_model_id;
    cmd_create->add_option("model", create_model_id, "model id (lr, ridge, ...)")->required();

    CLI::App* cmd_tune = app.add_subcommand("tune", "random-search the model's hyperparameter grid");
    add_common(cmd_tune, tune_o);
    std::string tune_model_id;
    std::size_t iters = 10;
    cmd_tune->add_option("model", tune_model_id, "model id")->required();
    cmd_tune->add_option("--iters", iters, "search iterations (default 10)");

    CLI::App* cmd_plot = app.add_subcommand("plot", "render gain / learning / feature charts");
    add_common(cmd_plot, plot_o);
    std::string plot_model_id, plot_kind;
    cmd_plot->add_option("model", plot_model_id, "model id")->required();
    cmd_plot->add_option("--kind", plot_kind, "gain | learning | feature")->required();

    CLI::App* cmd_predict = app.add_subcommand("predict", "apply a saved model to new data");
    std::string predict_model_path, predict_data, predict_target, predict_out = ".";
    cmd_predict->add_option("model_file", predict_model_path, "saved .afpl pipeline")->required();
    cmd_predict->add_option("--data", predict_data, "input CSV file")->required();
    cmd_predict->add_option("--target", predict_target, "target column for scoring (optional)");
    cmd_predict->add_option("--out", predict_out, "output directory")->envname("AUTOFLOW_OUT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (cmd_setup->parsed()) return run_setup(setup_o);
        if (cmd_compare->parsed()) return run_compare(compare_o, sort, n_select, include, exclude);
        if (cmd_create->parsed()) return run_create(create_o, create_model_id);
        if (cmd_tune->parsed()) return run_tune(tune_o, tune_model_id, iters);
        if (cmd_plot->parsed()) return run_plot(plot_o, plot_model_id, plot_kind);
        if (cmd_predict->parsed())
            return run_predict(predict_model_path, predict_data, predict_target, predict_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
