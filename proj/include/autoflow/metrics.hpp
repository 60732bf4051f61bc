#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "autoflow/pipeline.hpp"
#include "autoflow/preprocess.hpp"

namespace autoflow {

struct Confusion {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
};

Confusion confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

struct BasicMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Zero denominators yield 0, never NaN.
BasicMetrics basic_metrics(const Confusion& c);

/// (p_o - p_e) / (1 - p_e); 0 when p_e = 1.
double cohen_kappa(const Confusion& c);

/// Matthews correlation; 0 when any marginal factor is 0.
double mcc(const Confusion& c);

/// Mann-Whitney rank statistic with average ranks for ties.
/// Single-class input -> UndefinedAUC.
double roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

struct MetricRow {
    double accuracy = 0.0;
    double auc = 0.0;
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    double kappa = 0.0;
    double mcc = 0.0;
    double fit_time = 0.0;  // seconds
};

/// Full row from predictions; AUC from scores when given, else the literal 0
/// used for no-probability models.
MetricRow evaluate_predictions(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                               const std::vector<double>* scores);

MetricRow metric_mean(const std::vector<MetricRow>& rows);
MetricRow metric_std(const std::vector<MetricRow>& rows);  // population convention

/// accuracy | auc | recall | precision | f1 | kappa | mcc (BadConfig otherwise)
double metric_by_name(const MetricRow& row, std::string_view name);
bool is_metric_name(std::string_view name);

struct CVReport {
    ModelId model_id;
    std::vector<MetricRow> fold_rows;
    MetricRow mean_row;
    MetricRow std_row;
    std::vector<std::vector<std::size_t>> fold_eval_indices;
};

struct CVExtra {
    std::vector<double> train_accuracy;  // per fold, on the fold's own training rows
};

/// For each fold: refit the whole pipeline (preprocessing included, so no
/// leakage) on the out-of-fold rows, evaluate on the fold. Deterministic in
/// (x, y, plan, seed): fold f fits with derive_seed(seed, f).
CVReport cross_validate(const Pipeline& proto, const Table& x, const std::vector<int>& y,
                        const FoldPlan& plan, std::uint64_t seed, CVExtra* extra = nullptr);

}  // namespace autoflow
