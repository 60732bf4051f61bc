#include <cmath>
#include <set>

#include "autoflow/metrics.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace autoflow;
using testsup::error_code_of;

namespace {

// O(n^2) pairwise oracle: wins + half-ties over all positive/negative pairs
double auc_brute_force(const std::vector<int>& y, const std::vector<double>& s) {
    double num = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!y[i]) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j]) continue;
            ++pairs;
            if (s[i] > s[j]) num += 1.0;
            else if (s[i] == s[j]) num += 0.5;
        }
    }
    return num / static_cast<double>(pairs);
}

Confusion random_confusion(SplitMix64& rng, bool allow_zeros) {
    Confusion c;
    c.tp = rng.next_below(allow_zeros ? 4 : 200);
    c.fp = rng.next_below(allow_zeros ? 4 : 200);
    c.fn = rng.next_below(allow_zeros ? 4 : 200);
    c.tn = rng.next_below(allow_zeros ? 4 : 200);
    if (c.total() == 0) c.tn = 1;
    return c;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("confusion counts") {
    const Confusion c = confusion({1, 1, 0, 0}, {1, 0, 0, 1});
    CHECK(c.tp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 1);
    CHECK(c.fp == 1);

    const Confusion perfect = confusion({1, 0, 1}, {1, 0, 1});
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);

    const Confusion constant = confusion({1, 1, 0}, {0, 0, 0});
    CHECK(constant.tp == 0);
    CHECK(constant.fp == 0);
}

TEST_CASE("basic metrics: hand-computed 2/1/1/2 case") {
    const Confusion c{2, 1, 1, 2};
    const BasicMetrics m = basic_metrics(c);
    CHECK(m.accuracy == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
    CHECK(m.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("basic metrics: constant-negative predictor earns zeros") {
    const Confusion c{0, 0, 268, 500};
    const BasicMetrics m = basic_metrics(c);
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
    CHECK(m.accuracy == doctest::Approx(500.0 / 768.0));
}

TEST_CASE("basic metrics: all positive, all correct") {
    const Confusion c{10, 0, 0, 0};
    const BasicMetrics m = basic_metrics(c);
    CHECK(m.accuracy == 1.0);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
}

TEST_CASE("cohen kappa: hand case 1/3, perfect 1, constant 0") {
    CHECK(cohen_kappa({2, 1, 1, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(cohen_kappa({5, 0, 0, 5}) == 1.0);
    CHECK(cohen_kappa({0, 0, 268, 500}) == 0.0);  // p_o equals p_e for constant predictions
}

TEST_CASE("mcc: hand case 1/3, perfect 1, zero-factor 0") {
    CHECK(mcc({2, 1, 1, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mcc({5, 0, 0, 5}) == 1.0);
    CHECK(mcc({0, 0, 268, 500}) == 0.0);
}

TEST_CASE("kappa and mcc are invariant under class swap") {
    SplitMix64 rng(70);
    for (int trial = 0; trial < 50; ++trial) {
        const Confusion c = random_confusion(rng, trial % 3 == 0);
        const Confusion swapped{c.tn, c.fn, c.fp, c.tp};  // tp<->tn, fp<->fn
        CHECK(cohen_kappa(c) == doctest::Approx(cohen_kappa(swapped)).epsilon(1e-12));
        CHECK(mcc(c) == doctest::Approx(mcc(swapped)).epsilon(1e-12));
    }
}

TEST_CASE("roc_auc: hand case 0.75, perfect 1, all ties 0.5") {
    CHECK(roc_auc({0, 0, 1, 1}, {0.1, 0.4, 0.35, 0.8}) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(roc_auc({0, 1, 0, 1}, {0.1, 0.9, 0.2, 0.8}) == 1.0);
    CHECK(roc_auc({0, 1, 1, 0}, {0.3, 0.3, 0.3, 0.3}) == 0.5);
    CHECK(error_code_of([] { roc_auc({1, 1}, {0.1, 0.2}); }) == ErrorCode::UndefinedAuc);
}

TEST_CASE("roc_auc equals the pairwise brute-force oracle") {
    SplitMix64 rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.next_below(49);
        auto y = testsup::random_labels(n, rng);
        std::vector<double> s(n);
        for (auto& v : s) v = rng.next_unit();
        if (trial % 2) {  // inject heavy ties
            for (auto& v : s) v = std::floor(v * 5.0) / 5.0;
        }
        CHECK(std::abs(roc_auc(y, s) - auc_brute_force(y, s)) < 1e-12);
    }
}

TEST_CASE("roc_auc(y, s) + roc_auc(y, -s) = 1") {
    SplitMix64 rng(72);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.next_below(40);
        auto y = testsup::random_labels(n, rng);
        std::vector<double> s(n), neg(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = trial % 2 ? std::floor(rng.next_unit() * 4.0) / 4.0 : rng.next_unit();
            neg[i] = -s[i];
        }
        CHECK(std::abs(roc_auc(y, s) + roc_auc(y, neg) - 1.0) < 1e-12);
    }
}

TEST_CASE("mean and std rows recompute from fold rows") {
    SplitMix64 rng(73);
    std::vector<MetricRow> rows(7);
    for (auto& r : rows) {
        r.accuracy = rng.next_unit();
        r.auc = rng.next_unit();
        r.kappa = rng.next_unit() * 2.0 - 1.0;
        r.mcc = rng.next_unit() * 2.0 - 1.0;
        r.f1 = rng.next_unit();
        r.precision = rng.next_unit();
        r.recall = rng.next_unit();
    }
    const MetricRow mean = metric_mean(rows);
    const MetricRow sd = metric_std(rows);
    double acc = 0.0;
    for (const auto& r : rows) acc += r.accuracy;
    CHECK(mean.accuracy == doctest::Approx(acc / 7.0).epsilon(1e-12));
    double ss = 0.0;
    for (const auto& r : rows) ss += std::pow(r.accuracy - mean.accuracy, 2);
    CHECK(sd.accuracy == doctest::Approx(std::sqrt(ss / 7.0)).epsilon(1e-9));
}

TEST_CASE("cross_validate: hand-traceable 2-fold on 4 points") {
    // X = 0,1,2,3 with labels 0,1,1,0 and folds {0,1} / {2,3}: each fold's
    // training pair is one 0 and one 1, and the tree misclassifies exactly
    // one of the two held-out rows
    const Table x = testsup::table_from(Matrix::from_rows({{0.0}, {1.0}, {2.0}, {3.0}}));
    const std::vector<int> y = {0, 1, 1, 0};
    const FoldPlan plan(2, {0, 0, 1, 1});
    const Pipeline p = make_pipeline({Stage::estimate("clf", create_estimator(ModelId::dt))});
    const CVReport report = cross_validate(p, x, y, plan, 1);
    REQUIRE(report.fold_rows.size() == 2);
    CHECK(report.fold_rows[0].accuracy == 0.5);
    CHECK(report.fold_rows[1].accuracy == 0.5);
    CHECK(report.mean_row.accuracy == 0.5);
}

TEST_CASE("cross_validate partition: fold evaluations cover the data once") {
    SplitMix64 rng(74);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = 2 + rng.next_below(4);
        std::vector<int> y;
        for (;;) {
            y = testsup::random_labels(20 + rng.next_below(30), rng);
            std::size_t pos = 0;
            for (int v : y) pos += static_cast<std::size_t>(v);
            if (pos >= k && y.size() - pos >= k) break;
        }
        Matrix m(y.size(), 2);
        for (std::size_t i = 0; i < y.size(); ++i) {
            m.at(i, 0) = testsup::gaussian(rng);
            m.at(i, 1) = testsup::gaussian(rng);
        }
        const FoldPlan plan = stratified_kfold(y, k, rng.next());
        const Pipeline p =
            make_pipeline({Stage::estimate("clf", create_estimator(ModelId::dummy))});
        const CVReport report = cross_validate(p, testsup::table_from(m), y, plan, 0);
        std::set<std::size_t> seen;
        std::size_t total = 0;
        for (const auto& idx : report.fold_eval_indices) {
            total += idx.size();
            seen.insert(idx.begin(), idx.end());
        }
        CHECK(total == y.size());
        CHECK(seen.size() == y.size());
    }
}

TEST_CASE("cross_validate: no-probability models report fold AUC 0") {
    SplitMix64 rng(75);
    const Matrix m = testsup::random_matrix(40, 3, rng);
    const auto y = testsup::signal_labels(m, rng);
    const FoldPlan plan = stratified_kfold(y, 4, 2);
    const Pipeline p = make_pipeline({Stage::estimate("clf", create_estimator(ModelId::ridge))});
    const CVReport report = cross_validate(p, testsup::table_from(m), y, plan, 0);
    for (const auto& row : report.fold_rows) CHECK(row.auc == 0.0);
    CHECK(report.mean_row.auc == 0.0);
}

TEST_CASE("degenerate training fold reports its index") {
    const Table x = testsup::table_from(Matrix::from_rows({{0.0}, {1.0}, {2.0}, {3.0}}));
    const std::vector<int> y = {0, 1, 0, 0};
    const FoldPlan plan(2, {1, 1, 0, 0});  // fold 1 trains on rows 2,3: single class
    const Pipeline p = make_pipeline({Stage::estimate("clf", create_estimator(ModelId::lr))});
    CHECK(error_code_of([&] { cross_validate(p, x, y, plan, 0); }) == ErrorCode::DegenerateFold);
}

TEST_CASE("metric_by_name resolves every column and rejects unknowns") {
    MetricRow r;
    r.accuracy = 0.5;
    r.mcc = -0.25;
    CHECK(metric_by_name(r, "accuracy") == 0.5);
    CHECK(metric_by_name(r, "mcc") == -0.25);
    CHECK(is_metric_name("kappa"));
    CHECK_FALSE(is_metric_name("speed"));
    CHECK(error_code_of([&] { metric_by_name(r, "speed"); }) == ErrorCode::BadConfig);
}

}  // TEST_SUITE
