#pragma once

#include <string>
#include <utility>
#include <vector>

#include "autoflow/experiment.hpp"

namespace autoflow {

enum class ChartKind { gain, learning, feature };

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;  // x non-decreasing
};

struct ChartSpec {
    ChartKind kind = ChartKind::gain;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool diagonal_reference = false;       // draw the y = x baseline
    std::vector<std::string> bar_labels;   // feature charts: one label per point
};

/// Cumulative-gain curve: rows sorted by descending score (ties by ascending
/// original index); point i = (i/n, positives among top i / total positives),
/// with (0,0) prepended. Monotone, endpoints exactly (0,0) and (1,1).
ChartSpec gain_curve(const std::vector<int>& y_true, const std::vector<double>& scores);

struct LearningCurve {
    ChartSpec chart;
    std::vector<std::string> warnings;  // skipped fractions
};

/// For each fraction: stratified seeded subsample of the train split, full CV
/// on it, one point per series ("train", "validation") at x = fraction x
/// train rows. The 1.0 point reproduces create_model's CV mean exactly.
LearningCurve learning_curve(const Experiment& exp, ModelId id,
                             const std::vector<double>& fractions = {});

/// Importance bars sorted descending. Linear models: |coefficient| x feature
/// std; trees: normalized impurity decrease; others -> NoImportance.
ChartSpec feature_importance(const FittedModel& m, const std::vector<std::string>& feature_names);
ChartSpec feature_importance(const FittedPipeline& fp);

/// Deterministic, self-contained SVG 1.1; same ChartSpec -> same bytes.
std::string to_svg(const ChartSpec& c);
void render_svg(const ChartSpec& c, const std::string& path);

/// One row per point: series,x,y with exact round-trip number formatting.
std::string chart_csv(const ChartSpec& c);
void render_csv(const ChartSpec& c, const std::string& path);

}  // namespace autoflow
