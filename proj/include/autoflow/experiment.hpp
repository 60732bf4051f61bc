#pragma once

#include <optional>
#include <string>
#include <vector>

#include "autoflow/metrics.hpp"
#include "autoflow/pipeline.hpp"
#include "autoflow/preprocess.hpp"
#include "autoflow/tabular.hpp"

namespace autoflow {

struct ExperimentConfig {
    std::uint64_t session_id = 123;  // master seed for splits, folds and models
    TargetSpec target;
    double train_size = 0.7;
    std::size_t fold_number = 10;
    bool preprocess = true;  // mean/mode imputation + one-hot encoding
    std::string experiment_name = "clf-default-name";
};

struct ConfigReportRow {
    std::string description;
    std::string value;
};

/// Immutable product of setup(): the stratified train/holdout split, the fold
/// plan over the train split, and the preprocessing recipe every model
/// pipeline starts from.
class Experiment {
public:
    const ExperimentConfig& config() const { return config_; }
    const Table& full_table() const { return full_table_; }
    const Table& train_features() const { return train_features_; }
    const Table& holdout_features() const { return holdout_features_; }
    const std::vector<int>& train_labels() const { return train_labels_; }
    const std::vector<int>& holdout_labels() const { return holdout_labels_; }
    const std::vector<std::size_t>& train_indices() const { return train_indices_; }
    const std::vector<std::size_t>& holdout_indices() const { return holdout_indices_; }
    const FoldPlan& fold_plan() const { return fold_plan_; }
    const std::vector<ConfigReportRow>& report() const { return report_; }
    const std::string& positive_label() const { return positive_label_; }
    const std::string& negative_label() const { return negative_label_; }

    /// Fresh unfitted preprocessing stages (empty when preprocess = false).
    std::vector<Stage> preprocessing_stages() const;
    /// Preprocessing stages plus the estimator, ready for fit / CV.
    Pipeline model_pipeline(const Estimator& e) const;
    /// Stable per-model seed for the final refit on the whole train split.
    std::uint64_t refit_seed(ModelId id) const;

private:
    friend Experiment setup(const Table& data, const ExperimentConfig& config);
    Experiment() : fold_plan_(2, {0, 1}) {}

    ExperimentConfig config_;
    Table full_table_;
    Table train_features_;
    Table holdout_features_;
    std::vector<int> train_labels_;
    std::vector<int> holdout_labels_;
    std::vector<std::size_t> train_indices_;
    std::vector<std::size_t> holdout_indices_;
    FoldPlan fold_plan_;
    std::vector<ConfigReportRow> report_;
    std::string positive_label_;
    std::string negative_label_;
};

/// Stratified split + fold plan + config report, deterministic in session_id.
Experiment setup(const Table& data, const ExperimentConfig& config);

struct LeaderboardRow {
    ModelId id;
    MetricRow mean;
};

struct Leaderboard {
    std::vector<LeaderboardRow> rows;  // non-increasing by sort_metric, id tie-break
    std::string sort_metric;
    std::size_t n_select = 1;
    std::vector<ModelId> selected;  // the first n_select row ids
};

struct CompareOptions {
    std::string sort = "accuracy";
    std::size_t n_select = 1;
    std::vector<ModelId> include;  // empty = every candidate
    std::vector<ModelId> exclude;
};

struct CompareResult {
    std::vector<FittedPipeline> best;  // selected models refit on the whole train split
    Leaderboard board;
    std::vector<CVReport> reports;  // candidate (canonical id) order
};

/// Cross-validates every candidate on the experiment's fold plan.
CompareResult compare_models(const Experiment& exp, const CompareOptions& opts = {});

struct CreateResult {
    FittedPipeline pipeline;  // refit on the whole train split
    CVReport report;
};

CreateResult create_model(const Experiment& exp, ModelId id, const ParamMap& overrides = {});
CreateResult create_model(const Experiment& exp, std::string_view id);

struct TuneResult {
    FittedPipeline pipeline;
    CVReport report;
    ParamMap chosen;  // winning overrides (empty = documented defaults)
};

/// Random search over the model's documented grid: n_iter seeded draws
/// without replacement, scored by CV mean accuracy; ties keep the first draw.
TuneResult tune_model(const Experiment& exp, ModelId id, std::size_t n_iter = 10,
                      std::optional<std::uint64_t> seed = {});

struct PredictResult {
    std::vector<int> predictions;
    std::optional<std::vector<double>> scores;
    MetricRow holdout;
};

PredictResult predict_model(const Experiment& exp, const FittedPipeline& m);

/// On-disk format: magic "AFPL", u16 version, then config, schema snapshot
/// and fitted stage states as named-field sections. model_only strips the
/// preprocessing prefix and keeps the bare estimator.
void save_model(const FittedPipeline& fp, const std::string& path, bool model_only = false,
                const ExperimentConfig* config = nullptr);

struct LoadedModel {
    FittedPipeline pipeline;
    bool model_only = false;
    bool has_config = false;
    ExperimentConfig config;
};

LoadedModel load_model(const std::string& path);

}  // namespace autoflow
