#include "autoflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "autoflow/error.hpp"
#include "autoflow/rng.hpp"

namespace autoflow {

ChartSpec gain_curve(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size())
        fail(ErrorCode::SchemaMismatch, "scores and truth lengths differ");
    if (y_true.empty()) fail(ErrorCode::EmptyInput, "no rows for the gain curve");
    std::size_t total_pos = 0;
    for (int v : y_true) total_pos += static_cast<std::size_t>(v != 0);
    if (total_pos == 0 || total_pos == y_true.size())
        fail(ErrorCode::UndefinedAuc, "gain curve needs both classes present");

    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;  // ties by ascending original index
    });

    ChartSpec c;
    c.kind = ChartKind::gain;
    c.title = "Cumulative gain";
    c.x_label = "Fraction of sample";
    c.y_label = "Fraction of positives";
    c.diagonal_reference = true;

    Series s;
    s.name = "gain";
    s.points.emplace_back(0.0, 0.0);
    const double n = static_cast<double>(y_true.size());
    const double tp = static_cast<double>(total_pos);
    std::size_t cum = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        cum += static_cast<std::size_t>(y_true[order[i]] != 0);
        s.points.emplace_back(static_cast<double>(i + 1) / n, static_cast<double>(cum) / tp);
    }
    c.series.push_back(std::move(s));
    return c;
}

LearningCurve learning_curve(const Experiment& exp, ModelId id,
                             const std::vector<double>& fractions) {
    std::vector<double> fracs = fractions;
    if (fracs.empty())
        fracs = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::sort(fracs.begin(), fracs.end());
    for (double f : fracs)
        if (!(f > 0.0 && f <= 1.0)) fail(ErrorCode::BadConfig, "fractions must lie in (0, 1]");

    const std::vector<int>& y = exp.train_labels();
    const std::size_t n_train = y.size();
    const std::size_t k = exp.config().fold_number;
    std::vector<std::vector<std::size_t>> per_class(2);
    for (std::size_t i = 0; i < y.size(); ++i)
        per_class[static_cast<std::size_t>(y[i])].push_back(i);

    LearningCurve out;
    out.chart.kind = ChartKind::learning;
    out.chart.title = std::string("Learning curve: ") + std::string(model_display_name(id));
    out.chart.x_label = "Training rows";
    out.chart.y_label = "Accuracy";
    Series train_series{"train", {}};
    Series val_series{"validation", {}};

    for (std::size_t fi = 0; fi < fracs.size(); ++fi) {
        const double f = fracs[fi];
        bool feasible = true;
        std::vector<std::size_t> take(2);
        for (std::size_t c = 0; c < 2; ++c) {
            take[c] = static_cast<std::size_t>(
                std::floor(f * static_cast<double>(per_class[c].size())));
            if (take[c] < k) feasible = false;
        }
        if (!feasible) {
            out.warnings.push_back(
                "fraction " + format_number(f) + " skipped: too few rows per class for " +
                std::to_string(k) + " folds");
            continue;
        }

        std::vector<std::size_t> subsample;
        for (std::size_t c = 0; c < 2; ++c) {
            std::vector<std::size_t> members = per_class[c];
            SplitMix64 rng(derive_seed(exp.config().session_id, 0x1EA0 + fi * 2 + c));
            shuffle(members, rng);
            subsample.insert(subsample.end(), members.begin(),
                             members.begin() + static_cast<std::ptrdiff_t>(take[c]));
        }
        std::sort(subsample.begin(), subsample.end());

        const Table x_sub = exp.train_features().select_rows(subsample);
        std::vector<int> y_sub;
        y_sub.reserve(subsample.size());
        for (std::size_t i : subsample) y_sub.push_back(y[i]);

        // same fold seed and CV seed as the experiment, so f = 1.0 (the full
        // train split) reproduces create_model's report exactly
        const FoldPlan plan =
            stratified_kfold(y_sub, k, derive_seed(exp.config().session_id, 2));
        CVExtra extra;
        const CVReport report =
            cross_validate(exp.model_pipeline(create_estimator(id)), x_sub, y_sub, plan,
                           exp.config().session_id, &extra);

        double train_mean = 0.0;
        for (double a : extra.train_accuracy) train_mean += a;
        train_mean /= static_cast<double>(extra.train_accuracy.size());

        const double x_value = f * static_cast<double>(n_train);
        train_series.points.emplace_back(x_value, train_mean);
        val_series.points.emplace_back(x_value, report.mean_row.accuracy);
    }

    out.chart.series.push_back(std::move(train_series));
    out.chart.series.push_back(std::move(val_series));
    return out;
}

ChartSpec feature_importance(const FittedModel& m, const std::vector<std::string>& feature_names) {
    const auto imp = m.feature_importances();
    if (!imp)
        fail(ErrorCode::NoImportance, std::string(model_display_name(m.id())) +
                                          " has no feature importances");
    if (imp->size() != feature_names.size())
        fail(ErrorCode::SchemaMismatch, "importance and feature-name counts differ");

    std::vector<std::size_t> order(imp->size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if ((*imp)[a] != (*imp)[b]) return (*imp)[a] > (*imp)[b];
        return a < b;
    });

    ChartSpec c;
    c.kind = ChartKind::feature;
    c.title = std::string("Feature importance: ") + std::string(model_display_name(m.id()));
    c.x_label = "Importance";
    c.y_label = "Feature";
    Series s;
    s.name = "importance";
    for (std::size_t i = 0; i < order.size(); ++i) {
        s.points.emplace_back(static_cast<double>(i), (*imp)[order[i]]);
        c.bar_labels.push_back(feature_names[order[i]]);
    }
    c.series.push_back(std::move(s));
    return c;
}

ChartSpec feature_importance(const FittedPipeline& fp) {
    const FittedModel* m = fp.model();
    if (!m) fail(ErrorCode::NotAnEstimator, "pipeline has no estimator stage");
    std::vector<std::string> names;
    for (const auto& s : fp.estimator_input_schema()) names.push_back(s.name);
    return feature_importance(*m, names);
}

// ------------------------------------------------------------------- render

namespace {

void check_not_empty(const ChartSpec& c) {
    std::size_t points = 0;
    for (const Series& s : c.series) points += s.points.size();
    if (c.series.empty() || points == 0)
        fail(ErrorCode::EmptyChart, "chart has no points to render");
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b"};

constexpr double kWidth = 860.0, kHeight = 540.0;
constexpr double kLeft = 70.0, kRight = 210.0, kTop = 50.0, kBottom = 60.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

struct Range {
    double lo = 0.0, hi = 1.0;
    double scale(double v) const { return (v - lo) / (hi - lo); }
};

Range data_range(const ChartSpec& c, bool x_axis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Series& s : c.series)
        for (const auto& [x, y] : s.points) {
            const double v = x_axis ? x : y;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (c.diagonal_reference) {  // baseline spans the same box
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 1.0);
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi};
}

std::string line_chart_svg(const ChartSpec& c) {
    const Range rx = data_range(c, true);
    const Range ry = data_range(c, false);
    auto px = [&](double x) { return kLeft + rx.scale(x) * kPlotW; };
    auto py = [&](double y) { return kTop + (1.0 - ry.scale(y)) * kPlotH; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 860 540\" "
           "font-family=\"sans-serif\" font-size=\"13\">\n";
    svg += "<rect width=\"860\" height=\"540\" fill=\"white\"/>\n";
    svg += "<text x=\"" + coord(kLeft + kPlotW / 2) + "\" y=\"28\" text-anchor=\"middle\" "
           "font-size=\"17\">" + xml_escape(c.title) + "</text>\n";

    // frame + ticks
    svg += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) + "\" width=\"" + coord(kPlotW) +
           "\" height=\"" + coord(kPlotH) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 5.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * i / 5.0;
        const double gx = px(fx), gy = py(fy);
        svg += "<line x1=\"" + coord(gx) + "\" y1=\"" + coord(kTop + kPlotH) + "\" x2=\"" +
               coord(gx) + "\" y2=\"" + coord(kTop + kPlotH + 5) + "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + coord(gx) + "\" y=\"" + coord(kTop + kPlotH + 20) +
               "\" text-anchor=\"middle\">" + xml_escape(format_number(fx)) + "</text>\n";
        svg += "<line x1=\"" + coord(kLeft - 5) + "\" y1=\"" + coord(gy) + "\" x2=\"" +
               coord(kLeft) + "\" y2=\"" + coord(gy) + "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + coord(kLeft - 9) + "\" y=\"" + coord(gy + 4) +
               "\" text-anchor=\"end\">" + xml_escape(format_number(fy)) + "</text>\n";
    }
    svg += "<text x=\"" + coord(kLeft + kPlotW / 2) + "\" y=\"" + coord(kHeight - 14) +
           "\" text-anchor=\"middle\">" + xml_escape(c.x_label) + "</text>\n";
    svg += "<text x=\"20\" y=\"" + coord(kTop + kPlotH / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + coord(kTop + kPlotH / 2) +
           ")\">" + xml_escape(c.y_label) + "</text>\n";

    if (c.diagonal_reference) {
        svg += "<line x1=\"" + coord(px(rx.lo)) + "\" y1=\"" + coord(py(rx.lo)) + "\" x2=\"" +
               coord(px(rx.hi)) + "\" y2=\"" + coord(py(rx.hi)) +
               "\" stroke=\"#999\" stroke-dasharray=\"6 4\"/>\n";
    }

    for (std::size_t si = 0; si < c.series.size(); ++si) {
        const Series& s = c.series[si];
        if (s.points.empty()) continue;
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string pts;
        for (const auto& [x, y] : s.points) {
            if (!pts.empty()) pts.push_back(' ');
            pts += coord(px(x)) + "," + coord(py(y));
        }
        svg += std::string("<polyline fill=\"none\" stroke=\"") + color +
               "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        // legend
        const double ly = kTop + 14.0 + 22.0 * static_cast<double>(si);
        svg += std::string("<line x1=\"") + coord(kWidth - kRight + 16) + "\" y1=\"" + coord(ly) +
               "\" x2=\"" + coord(kWidth - kRight + 44) + "\" y2=\"" + coord(ly) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + coord(kWidth - kRight + 50) + "\" y=\"" + coord(ly + 4) + "\">" +
               xml_escape(s.name) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string bar_chart_svg(const ChartSpec& c) {
    const Series& s = c.series.front();
    const std::size_t n = s.points.size();
    double max_v = 0.0;
    for (const auto& [x, y] : s.points) max_v = std::max(max_v, y);
    if (max_v <= 0.0) max_v = 1.0;

    const double label_w = 230.0;
    const double bar_area = kWidth - label_w - 120.0;
    const double row_h = std::min(34.0, (kHeight - kTop - 30.0) / static_cast<double>(n));

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 860 540\" "
           "font-family=\"sans-serif\" font-size=\"13\">\n";
    svg += "<rect width=\"860\" height=\"540\" fill=\"white\"/>\n";
    svg += "<text x=\"430\" y=\"28\" text-anchor=\"middle\" font-size=\"17\">" +
           xml_escape(c.title) + "</text>\n";

    for (std::size_t i = 0; i < n; ++i) {
        const double v = s.points[i].second;
        const double y0 = kTop + row_h * static_cast<double>(i);
        std::string label = i < c.bar_labels.size() ? c.bar_labels[i] : "";
        if (label.size() > 36) label = label.substr(0, 34) + "..";
        svg += "<text x=\"" + coord(label_w - 8) + "\" y=\"" + coord(y0 + row_h * 0.68) +
               "\" text-anchor=\"end\">" + xml_escape(label) + "</text>\n";
        svg += "<rect x=\"" + coord(label_w) + "\" y=\"" + coord(y0 + row_h * 0.2) + "\" width=\"" +
               coord(bar_area * (v / max_v)) + "\" height=\"" + coord(row_h * 0.6) +
               "\" fill=\"#1f77b4\"/>\n";
        char val[32];
        std::snprintf(val, sizeof(val), "%.4f", v);
        svg += "<text x=\"" + coord(label_w + bar_area * (v / max_v) + 6) + "\" y=\"" +
               coord(y0 + row_h * 0.68) + "\">" + val + "</text>\n";
    }
    svg += "<text x=\"" + coord(label_w + bar_area / 2) + "\" y=\"" + coord(kHeight - 14) +
           "\" text-anchor=\"middle\">" + xml_escape(c.x_label) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace

std::string to_svg(const ChartSpec& c) {
    check_not_empty(c);
    return c.kind == ChartKind::feature ? bar_chart_svg(c) : line_chart_svg(c);
}

void render_svg(const ChartSpec& c, const std::string& path) {
    const std::string svg = to_svg(c);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out << svg;
}

std::string chart_csv(const ChartSpec& c) {
    check_not_empty(c);
    std::string out = "series,x,y\n";
    for (const Series& s : c.series) {
        std::string name = s.name;
        if (name.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char ch : name) {
                if (ch == '"') quoted += "\"\"";
                else quoted.push_back(ch);
            }
            quoted.push_back('"');
            name = quoted;
        }
        for (const auto& [x, y] : s.points)
            out += name + "," + format_number(x) + "," + format_number(y) + "\n";
    }
    return out;
}

void render_csv(const ChartSpec& c, const std::string& path) {
    const std::string csv = chart_csv(c);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out << csv;
}

}  // namespace autoflow
