#include "autoflow/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "autoflow/error.hpp"
#include "autoflow/rng.hpp"

namespace autoflow {

Confusion confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        fail(ErrorCode::SchemaMismatch, "prediction and truth lengths differ");
    if (y_true.empty()) fail(ErrorCode::EmptyInput, "no predictions to score");
    Confusion c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i]) {
            y_pred[i] ? ++c.tp : ++c.fn;
        } else {
            y_pred[i] ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

BasicMetrics basic_metrics(const Confusion& c) {
    const double n = static_cast<double>(c.total());
    BasicMetrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / n;
    m.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    m.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

double cohen_kappa(const Confusion& c) {
    const double n = static_cast<double>(c.total());
    const double po = static_cast<double>(c.tp + c.tn) / n;
    const double pe = (static_cast<double>(c.tp + c.fp) * static_cast<double>(c.tp + c.fn) +
                       static_cast<double>(c.fn + c.tn) * static_cast<double>(c.fp + c.tn)) /
                      (n * n);
    if (pe >= 1.0) return 0.0;
    return (po - pe) / (1.0 - pe);
}

double mcc(const Confusion& c) {
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom <= 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(denom);
}

double roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size())
        fail(ErrorCode::SchemaMismatch, "scores and truth lengths differ");
    std::size_t n_pos = 0;
    for (int v : y_true) n_pos += static_cast<std::size_t>(v != 0);
    const std::size_t n = y_true.size();
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        fail(ErrorCode::UndefinedAuc, "AUC needs both classes present");
    for (double s : scores)
        if (!std::isfinite(s)) fail(ErrorCode::BadConfig, "scores must be finite");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average rank within tie groups (1-based ranks)
    double rank_pos_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (y_true[order[k]]) rank_pos_sum += avg_rank;
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    return (rank_pos_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

MetricRow evaluate_predictions(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                               const std::vector<double>* scores) {
    const Confusion c = confusion(y_true, y_pred);
    const BasicMetrics b = basic_metrics(c);
    MetricRow row;
    row.accuracy = b.accuracy;
    row.precision = b.precision;
    row.recall = b.recall;
    row.f1 = b.f1;
    row.kappa = cohen_kappa(c);
    row.mcc = mcc(c);
    row.auc = scores ? roc_auc(y_true, *scores) : 0.0;
    return row;
}

namespace {

template <typename F>
void for_each_field(MetricRow& row, F&& f) {
    f(row.accuracy);
    f(row.auc);
    f(row.recall);
    f(row.precision);
    f(row.f1);
    f(row.kappa);
    f(row.mcc);
    f(row.fit_time);
}

}  // namespace

MetricRow metric_mean(const std::vector<MetricRow>& rows) {
    MetricRow mean;
    if (rows.empty()) return mean;
    for (const MetricRow& r : rows) {
        mean.accuracy += r.accuracy;
        mean.auc += r.auc;
        mean.recall += r.recall;
        mean.precision += r.precision;
        mean.f1 += r.f1;
        mean.kappa += r.kappa;
        mean.mcc += r.mcc;
        mean.fit_time += r.fit_time;
    }
    const double k = static_cast<double>(rows.size());
    for_each_field(mean, [k](double& v) { v /= k; });
    return mean;
}

MetricRow metric_std(const std::vector<MetricRow>& rows) {
    MetricRow out;
    if (rows.empty()) return out;
    const MetricRow mean = metric_mean(rows);
    auto accum = [&](auto getter, double& dst) {
        double ss = 0.0;
        for (const MetricRow& r : rows) {
            const double d = getter(r) - getter(mean);
            ss += d * d;
        }
        dst = std::sqrt(ss / static_cast<double>(rows.size()));
    };
    accum([](const MetricRow& r) { return r.accuracy; }, out.accuracy);
    accum([](const MetricRow& r) { return r.auc; }, out.auc);
    accum([](const MetricRow& r) { return r.recall; }, out.recall);
    accum([](const MetricRow& r) { return r.precision; }, out.precision);
    accum([](const MetricRow& r) { return r.f1; }, out.f1);
    accum([](const MetricRow& r) { return r.kappa; }, out.kappa);
    accum([](const MetricRow& r) { return r.mcc; }, out.mcc);
    accum([](const MetricRow& r) { return r.fit_time; }, out.fit_time);
    return out;
}

double metric_by_name(const MetricRow& row, std::string_view name) {
    if (name == "accuracy") return row.accuracy;
    if (name == "auc") return row.auc;
    if (name == "recall") return row.recall;
    if (name == "precision") return row.precision;
    if (name == "f1") return row.f1;
    if (name == "kappa") return row.kappa;
    if (name == "mcc") return row.mcc;
    fail(ErrorCode::BadConfig, "unknown metric '" + std::string(name) + "'");
}

bool is_metric_name(std::string_view name) {
    static constexpr std::string_view kNames[] = {"accuracy", "auc",   "recall", "precision",
                                                  "f1",       "kappa", "mcc"};
    return std::find(std::begin(kNames), std::end(kNames), name) != std::end(kNames);
}

CVReport cross_validate(const Pipeline& proto, const Table& x, const std::vector<int>& y,
                        const FoldPlan& plan, std::uint64_t seed, CVExtra* extra) {
    if (!proto.has_estimator())
        fail(ErrorCode::NotAnEstimator, "cross-validation needs an estimator stage");
    if (plan.n_rows() != x.n_rows() || x.n_rows() != y.size())
        fail(ErrorCode::SchemaMismatch, "fold plan does not cover the data");

    const bool proba = proto.estimator().supports_proba;
    CVReport report;
    report.model_id = proto.estimator().id;

    for (std::size_t f = 0; f < plan.k(); ++f) {
        const std::vector<std::size_t> train_idx = plan.train_indices(f);
        const std::vector<std::size_t> eval_idx = plan.fold_indices(f);
        const Table x_train = x.select_rows(train_idx);
        const Table x_eval = x.select_rows(eval_idx);
        std::vector<int> y_train, y_eval;
        y_train.reserve(train_idx.size());
        y_eval.reserve(eval_idx.size());
        for (std::size_t i : train_idx) y_train.push_back(y[i]);
        for (std::size_t i : eval_idx) y_eval.push_back(y[i]);

        const auto t0 = std::chrono::steady_clock::now();
        FittedPipeline fitted = [&] {
            try {
                return fit(proto, x_train, y_train, derive_seed(seed, f));
            } catch (const Error& e) {
                if (e.code() == ErrorCode::DegenerateTarget)
                    fail(ErrorCode::DegenerateFold,
                         "fold " + std::to_string(f) + " leaves a single-class training set");
                throw;
            }
        }();
        const auto t1 = std::chrono::steady_clock::now();

        const std::vector<int> preds = fitted.predict(x_eval);
        MetricRow row;
        if (proba) {
            const std::vector<double> s = fitted.predict_proba(x_eval);
            row = evaluate_predictions(y_eval, preds, &s);
        } else {
            row = evaluate_predictions(y_eval, preds, nullptr);
        }
        row.fit_time = std::chrono::duration<double>(t1 - t0).count();
        report.fold_rows.push_back(row);
        report.fold_eval_indices.push_back(eval_idx);

        if (extra) {
            const std::vector<int> train_preds = fitted.predict(x_train);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < train_preds.size(); ++i)
                hits += static_cast<std::size_t>(train_preds[i] == y_train[i]);
            extra->train_accuracy.push_back(static_cast<double>(hits) /
                                            static_cast<double>(train_preds.size()));
        }
    }

    report.mean_row = metric_mean(report.fold_rows);
    report.std_row = metric_std(report.fold_rows);
    return report;
}

}  // namespace autoflow
