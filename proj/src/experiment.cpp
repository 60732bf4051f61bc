#include "autoflow/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "autoflow/error.hpp"
#include "autoflow/rng.hpp"

namespace autoflow {

namespace {

// derivation streams for the session master seed
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kFoldStream = 2;
constexpr std::uint64_t kTuneStream = 3;
constexpr std::uint64_t kRefitBase = 0x100;

std::string shape_string(std::size_t rows, std::size_t cols) {
    return "(" + std::to_string(rows) + ", " + std::to_string(cols) + ")";
}

std::string session_tag(const Table& data, const ExperimentConfig& config) {
    // FNV-1a over the ingredients that identify the run; purely cosmetic
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    mix(config.session_id);
    mix(data.n_rows());
    mix(data.n_cols());
    for (char c : config.target.column) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string tag;
    for (int i = 0; i < 4; ++i) tag.push_back(hex[(h >> (4 * i)) & 0xf]);
    return tag;
}

}  // namespace

std::vector<Stage> Experiment::preprocessing_stages() const {
    if (!config_.preprocess) return {};
    std::vector<Stage> stages;
    stages.push_back(Stage::transform("impute_num", make_mean_imputer()));
    stages.push_back(Stage::transform("impute_cat", make_mode_imputer()));
    stages.push_back(Stage::transform("encode", make_one_hot()));
    return stages;
}

Pipeline Experiment::model_pipeline(const Estimator& e) const {
    std::vector<Stage> stages = preprocessing_stages();
    stages.push_back(Stage::estimate("model", e));
    return make_pipeline(std::move(stages));
}

std::uint64_t Experiment::refit_seed(ModelId id) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < kAllModels.size(); ++i)
        if (kAllModels[i] == id) index = i;
    return derive_seed(config_.session_id, kRefitBase + index);
}

Experiment setup(const Table& data, const ExperimentConfig& config) {
    if (data.n_rows() == 0) fail(ErrorCode::EmptyInput, "dataset has no rows");
    if (config.fold_number < 2) fail(ErrorCode::BadConfig, "fold_number must be at least 2");

    Experiment exp;
    exp.config_ = config;
    exp.full_table_ = data;

    const SplitXy sxy = split_xy(data, config.target);
    exp.positive_label_ = sxy.positive_label;
    exp.negative_label_ = sxy.negative_label;

    SplitSpec spec;
    spec.train_size = config.train_size;
    spec.seed = derive_seed(config.session_id, kSplitStream);
    spec.stratify = true;
    const StratifiedSplit split = stratified_split(sxy.labels, spec);
    exp.train_indices_ = split.train_indices;
    exp.holdout_indices_ = split.test_indices;

    exp.train_features_ = sxy.features.select_rows(split.train_indices);
    exp.holdout_features_ = sxy.features.select_rows(split.test_indices);
    for (std::size_t i : split.train_indices) exp.train_labels_.push_back(sxy.labels[i]);
    for (std::size_t i : split.test_indices) exp.holdout_labels_.push_back(sxy.labels[i]);

    exp.fold_plan_ = stratified_kfold(exp.train_labels_, config.fold_number,
                                      derive_seed(config.session_id, kFoldStream));

    // transformed shapes come from the prefix fitted on the train split only
    std::size_t transformed_cols = sxy.features.n_cols();
    std::size_t transformed_full_cols = sxy.features.n_cols();
    if (config.preprocess) {
        const Pipeline prefix = make_pipeline(exp.preprocessing_stages());
        const FittedPipeline fitted = fit(prefix, exp.train_features_, exp.train_labels_);
        transformed_cols = fitted.estimator_input_schema().size();
        transformed_full_cols = fitted.transform(sxy.features).n_cols();
    }

    auto& rows = exp.report_;
    rows.push_back({"Session id", std::to_string(config.session_id)});
    rows.push_back({"Target", config.target.column});
    rows.push_back({"Target type", "Binary"});
    rows.push_back({"Positive label", exp.positive_label_});
    rows.push_back({"Original data shape", shape_string(data.n_rows(), data.n_cols())});
    rows.push_back({"Transformed data shape", shape_string(data.n_rows(), transformed_full_cols + 1)});
    rows.push_back({"Transformed train set shape",
                    shape_string(exp.train_features_.n_rows(), transformed_cols + 1)});
    rows.push_back({"Transformed test set shape",
                    shape_string(exp.holdout_features_.n_rows(), transformed_cols + 1)});
    rows.push_back({"Numeric features",
                    std::to_string(sxy.features.count_kind(ColumnKind::Numeric))});
    rows.push_back({"Categorical features",
                    std::to_string(sxy.features.count_kind(ColumnKind::Categorical))});
    rows.push_back({"Preprocess", config.preprocess ? "True" : "False"});
    rows.push_back({"Imputation type", config.preprocess ? "simple" : "none"});
    rows.push_back({"Numeric imputation", "mean"});
    rows.push_back({"Categorical imputation", "mode"});
    rows.push_back({"Fold Generator", "StratifiedKFold"});
    rows.push_back({"Fold Number", std::to_string(config.fold_number)});
    rows.push_back({"CPU Jobs", "1 (parallel execution not supported)"});
    rows.push_back({"Use GPU", "False (not supported)"});
    rows.push_back({"Log Experiment", "False (not supported)"});
    rows.push_back({"Experiment Name", config.experiment_name});
    rows.push_back({"USI", session_tag(data, config)});
    return exp;
}

CompareResult compare_models(const Experiment& exp, const CompareOptions& opts) {
    if (!is_metric_name(opts.sort))
        fail(ErrorCode::BadConfig, "unknown sort metric '" + opts.sort + "'");
    for (ModelId id : opts.include)
        if (std::find(opts.exclude.begin(), opts.exclude.end(), id) != opts.exclude.end())
            fail(ErrorCode::BadConfig, "model '" + std::string(model_id_string(id)) +
                                           "' is both included and excluded");

    std::vector<ModelId> candidates;
    for (ModelId id : kAllModels) {
        if (!opts.include.empty() &&
            std::find(opts.include.begin(), opts.include.end(), id) == opts.include.end())
            continue;
        if (std::find(opts.exclude.begin(), opts.exclude.end(), id) != opts.exclude.end())
            continue;
        candidates.push_back(id);
    }
    if (candidates.empty()) fail(ErrorCode::NothingToCompare, "no candidate models left");

    CompareResult result;
    result.board.sort_metric = opts.sort;
    for (ModelId id : candidates) {
        const Estimator est = create_estimator(id);
        CVReport report = cross_validate(exp.model_pipeline(est), exp.train_features(),
                                         exp.train_labels(), exp.fold_plan(),
                                         exp.config().session_id);
        result.board.rows.push_back({id, report.mean_row});
        result.reports.push_back(std::move(report));
    }

    std::sort(result.board.rows.begin(), result.board.rows.end(),
              [&](const LeaderboardRow& a, const LeaderboardRow& b) {
                  const double ma = metric_by_name(a.mean, opts.sort);
                  const double mb = metric_by_name(b.mean, opts.sort);
                  if (ma != mb) return ma > mb;
                  return model_id_string(a.id) < model_id_string(b.id);
              });

    result.board.n_select = std::min(std::max<std::size_t>(opts.n_select, 1),
                                     result.board.rows.size());
    for (std::size_t i = 0; i < result.board.n_select; ++i) {
        const ModelId id = result.board.rows[i].id;
        result.board.selected.push_back(id);
        result.best.push_back(fit(exp.model_pipeline(create_estimator(id)), exp.train_features(),
                                  exp.train_labels(), exp.refit_seed(id)));
    }
    return result;
}

CreateResult create_model(const Experiment& exp, ModelId id, const ParamMap& overrides) {
    const Estimator est = create_estimator(id, overrides);
    CVReport report = cross_validate(exp.model_pipeline(est), exp.train_features(),
                                     exp.train_labels(), exp.fold_plan(),
                                     exp.config().session_id);
    FittedPipeline fitted = fit(exp.model_pipeline(est), exp.train_features(),
                                exp.train_labels(), exp.refit_seed(id));
    return {std::move(fitted), std::move(report)};
}

CreateResult create_model(const Experiment& exp, std::string_view id) {
    const Estimator est = create_estimator(id);  // UnknownModel on bad names
    return create_model(exp, est.id);
}

TuneResult tune_model(const Experiment& exp, ModelId id, std::size_t n_iter,
                      std::optional<std::uint64_t> seed) {
    if (n_iter == 0) fail(ErrorCode::BadConfig, "n_iter must be positive");
    std::vector<ParamMap> grid = tuning_grid(id);
    SplitMix64 rng(seed.value_or(derive_seed(exp.config().session_id, kTuneStream)));
    shuffle(grid, rng);  // draws without replacement
    if (grid.size() > n_iter) grid.resize(n_iter);

    std::optional<TuneResult> best;
    double best_score = 0.0;
    for (const ParamMap& params : grid) {
        const Estimator est = create_estimator(id, params);
        CVReport report = cross_validate(exp.model_pipeline(est), exp.train_features(),
                                         exp.train_labels(), exp.fold_plan(),
                                         exp.config().session_id);
        const double score = report.mean_row.accuracy;
        if (!best || score > best_score) {  // ties keep the first draw
            best_score = score;
            FittedPipeline fitted = fit(exp.model_pipeline(est), exp.train_features(),
                                        exp.train_labels(), exp.refit_seed(id));
            best = TuneResult{std::move(fitted), std::move(report), params};
        }
    }
    return std::move(*best);
}

PredictResult predict_model(const Experiment& exp, const FittedPipeline& m) {
    PredictResult out;
    out.predictions = m.predict(exp.holdout_features());
    if (m.supports_proba()) {
        out.scores = m.predict_proba(exp.holdout_features());
        out.holdout = evaluate_predictions(exp.holdout_labels(), out.predictions, &*out.scores);
    } else {
        out.holdout = evaluate_predictions(exp.holdout_labels(), out.predictions, nullptr);
    }
    return out;
}

// ------------------------------------------------------------ persistence

namespace {

constexpr char kMagic[4] = {'A', 'F', 'P', 'L'};
constexpr std::uint16_t kFormatVersion = 1;

serialize::FieldMap schema_fields(const FittedPipeline& fp) {
    serialize::FieldMap f;
    std::vector<std::string> in_names, est_names;
    std::vector<std::uint64_t> in_kinds, est_kinds;
    for (const auto& s : fp.feature_names_in()) {
        in_names.push_back(s.name);
        in_kinds.push_back(static_cast<std::uint64_t>(s.kind));
    }
    for (const auto& s : fp.estimator_input_schema()) {
        est_names.push_back(s.name);
        est_kinds.push_back(static_cast<std::uint64_t>(s.kind));
    }
    f.set_strs("input_names", std::move(in_names));
    f.set_u64s("input_kinds", std::move(in_kinds));
    f.set_strs("estimator_input_names", std::move(est_names));
    f.set_u64s("estimator_input_kinds", std::move(est_kinds));
    return f;
}

std::vector<ColumnSchema> schema_from_fields(const serialize::FieldMap& f, const char* names_key,
                                             const char* kinds_key) {
    const auto& names = f.strs(names_key);
    const auto& kinds = f.u64s(kinds_key);
    if (names.size() != kinds.size()) fail(ErrorCode::NotAModelFile, "bad schema section");
    std::vector<ColumnSchema> schema;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (kinds[i] > 1) fail(ErrorCode::NotAModelFile, "bad column kind");
        schema.push_back({names[i], static_cast<ColumnKind>(kinds[i])});
    }
    return schema;
}

}  // namespace

void save_model(const FittedPipeline& fp, const std::string& path, bool model_only,
                const ExperimentConfig* config) {
    if (!fp.has_estimator())
        fail(ErrorCode::NotAnEstimator, "only pipelines ending in an estimator can be saved");
    const FittedPipeline stripped = model_only ? fp.estimator_only() : fp;

    serialize::Writer w;
    w.raw(kMagic, 4);
    w.u16(kFormatVersion);
    w.u8(model_only ? 1 : 0);

    serialize::FieldMap config_f;
    config_f.set_u64("has_config", config ? 1 : 0);
    if (config) {
        config_f.set_u64("session_id", config->session_id);
        config_f.set_str("target_column", config->target.column);
        config_f.set_u64("has_positive", config->target.positive_label ? 1 : 0);
        if (config->target.positive_label)
            config_f.set_str("positive_label", *config->target.positive_label);
        config_f.set_f64("train_size", config->train_size);
        config_f.set_u64("fold_number", config->fold_number);
        config_f.set_u64("preprocess", config->preprocess ? 1 : 0);
        config_f.set_str("experiment_name", config->experiment_name);
    }
    config_f.write(w);

    schema_fields(stripped).write(w);

    w.u32(static_cast<std::uint32_t>(stripped.stages().size()));
    for (const FittedStage& s : stripped.stages()) {
        w.str(s.id);
        if (s.model) {
            w.u8(1);
            s.model->save(w);
        } else {
            w.u8(0);
            serialize::FieldMap f;
            f.set_str("kind", std::string(s.transformer->kind()));
            s.transformer->save(f);
            f.write(w);
        }
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    file.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!file) fail(ErrorCode::IoError, "short write to '" + path + "'");
}

LoadedModel load_model(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << file.rdbuf();
    const std::string bytes = ss.str();

    serialize::Reader r(bytes);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (std::string_view(magic, 4) != std::string_view(kMagic, 4))
        fail(ErrorCode::NotAModelFile, "'" + path + "' is not a saved pipeline");
    const std::uint16_t version = r.u16();
    if (version != kFormatVersion)
        fail(ErrorCode::UnsupportedVersion,
             "format version " + std::to_string(version) + " is not supported");

    LoadedModel out;
    out.model_only = r.u8() != 0;

    const serialize::FieldMap config_f = serialize::FieldMap::read(r);
    out.has_config = config_f.u64("has_config") != 0;
    if (out.has_config) {
        out.config.session_id = config_f.u64("session_id");
        out.config.target.column = config_f.str("target_column");
        if (config_f.u64("has_positive"))
            out.config.target.positive_label = config_f.str("positive_label");
        out.config.train_size = config_f.f64("train_size");
        out.config.fold_number = config_f.u64("fold_number");
        out.config.preprocess = config_f.u64("preprocess") != 0;
        out.config.experiment_name = config_f.str("experiment_name");
    }

    const serialize::FieldMap schema_f = serialize::FieldMap::read(r);
    auto in_schema = schema_from_fields(schema_f, "input_names", "input_kinds");
    auto est_schema =
        schema_from_fields(schema_f, "estimator_input_names", "estimator_input_kinds");

    const std::uint32_t n_stages = r.u32();
    std::vector<FittedStage> stages;
    for (std::uint32_t i = 0; i < n_stages; ++i) {
        FittedStage s;
        s.id = r.str();
        const std::uint8_t type = r.u8();
        if (type == 1) {
            s.model = load_fitted_model(r);
        } else if (type == 0) {
            const serialize::FieldMap f = serialize::FieldMap::read(r);
            s.transformer = load_fitted_transformer(f.str("kind"), f);
        } else {
            fail(ErrorCode::NotAModelFile, "unknown stage type");
        }
        stages.push_back(std::move(s));
    }

    out.pipeline =
        FittedPipeline::assemble(std::move(stages), std::move(in_schema), std::move(est_schema));
    return out;
}

}  // namespace autoflow
