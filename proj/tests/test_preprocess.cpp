#include <algorithm>
#include <cmath>
#include <set>

#include "autoflow/preprocess.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace autoflow;
using testsup::error_code_of;

namespace {

Table one_numeric(std::vector<double> values, std::vector<std::uint8_t> missing = {}) {
    return Table({{"x", ColumnKind::Numeric}},
                 {Column::numeric(std::move(values), std::move(missing))});
}

Table one_categorical(std::vector<std::string> values, std::vector<std::uint8_t> missing = {}) {
    return Table({{"c", ColumnKind::Categorical}},
                 {Column::categorical(std::move(values), std::move(missing))});
}

std::vector<int> pima_labels() {
    const Table t = read_csv(testsup::pima_path());
    return split_xy(t, {"Class variable", std::nullopt}).labels;
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("mean imputer fills missing with the training mean") {
    const Table train = one_numeric({1.0, 0.0, 3.0}, {0, 1, 0});
    const auto fitted = make_mean_imputer()->fit(train);
    const Table out = fitted->transform(train);
    CHECK(out.column(0).number(0) == 1.0);
    CHECK(out.column(0).number(1) == 2.0);  // (1+3)/2
    CHECK(out.column(0).number(2) == 3.0);
    CHECK_FALSE(out.column(0).has_missing());
}

TEST_CASE("mean imputer is the identity without missing values") {
    const Table train = one_numeric({4.0, 5.0});
    const Table out = make_mean_imputer()->fit(train)->transform(train);
    CHECK(out.column(0).number(0) == 4.0);
    CHECK(out.column(0).number(1) == 5.0);
}

TEST_CASE("mean imputer reuses the train statistic at transform") {
    const Table train = one_numeric({0.0, 4.0});
    const Table test = one_numeric({0.0}, {1});
    const Table out = make_mean_imputer()->fit(train)->transform(test);
    CHECK(out.column(0).number(0) == 2.0);
}

TEST_CASE("mean imputer on an all-missing column -> CannotImpute") {
    const Table train = one_numeric({0.0, 0.0}, {1, 1});
    CHECK(error_code_of([&] { make_mean_imputer()->fit(train); }) == ErrorCode::CannotImpute);
}

TEST_CASE("mode imputer: most frequent value, lexicographic tie-break") {
    const Table train = one_categorical({"a", "a", "b", ""}, {0, 0, 0, 1});
    const Table out = make_mode_imputer()->fit(train)->transform(train);
    CHECK(out.column(0).label(3) == "a");

    const Table tie = one_categorical({"b", "a"});
    const Table tie_probe = one_categorical({""}, {1});
    CHECK(make_mode_imputer()->fit(tie)->transform(tie_probe).column(0).label(0) == "a");

    const Table empty = one_categorical({"", ""}, {1, 1});
    CHECK(error_code_of([&] { make_mode_imputer()->fit(empty); }) == ErrorCode::CannotImpute);
}

TEST_CASE("imputers never alter observed cells") {
    SplitMix64 rng(11);
    std::vector<double> values;
    std::vector<std::uint8_t> missing;
    for (int i = 0; i < 100; ++i) {
        values.push_back(testsup::gaussian(rng));
        missing.push_back(rng.next_below(4) == 0 ? 1 : 0);
    }
    if (std::all_of(missing.begin(), missing.end(), [](auto m) { return m == 1; })) missing[0] = 0;
    const Table t = one_numeric(values, missing);
    const Table out = make_mean_imputer()->fit(t)->transform(t);
    for (std::size_t r = 0; r < t.n_rows(); ++r)
        if (!t.column(0).is_missing(r)) CHECK(out.column(0).number(r) == values[r]);
}

TEST_CASE("standard scaler: population std convention") {
    const Table train = one_numeric({1.0, 2.0, 3.0});
    const Table out = make_standard_scaler()->fit(train)->transform(train);
    const double expected = 1.0 / std::sqrt(2.0 / 3.0);  // (3-2)/popstd
    CHECK(out.column(0).number(0) == doctest::Approx(-expected).epsilon(1e-12));
    CHECK(out.column(0).number(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.column(0).number(2) == doctest::Approx(expected).epsilon(1e-12));

    // transformed training column: mean 0, population std 1
    double mean = 0.0;
    for (std::size_t r = 0; r < 3; ++r) mean += out.column(0).number(r);
    mean /= 3.0;
    CHECK(std::abs(mean) < 1e-12);
    double ss = 0.0;
    for (std::size_t r = 0; r < 3; ++r) ss += std::pow(out.column(0).number(r) - mean, 2);
    CHECK(std::sqrt(ss / 3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scaler maps a zero-variance column to zero") {
    const Table train = one_numeric({5.0, 5.0});
    const Table out = make_standard_scaler()->fit(train)->transform(train);
    CHECK(out.column(0).number(0) == 0.0);
    CHECK(out.column(0).number(1) == 0.0);
}

TEST_CASE("scaler refuses categorical input") {
    const Table train = one_categorical({"a", "b"});
    CHECK(error_code_of([&] { make_standard_scaler()->fit(train); }) == ErrorCode::NeedsEncoding);
}

TEST_CASE("pca on rank-1 data: one component carries all variance") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 10; ++i) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(static_cast<double>(i));  // exactly y = x
    }
    const Table t({{"x", ColumnKind::Numeric}, {"y", ColumnKind::Numeric}},
                  {Column::numeric(xs), Column::numeric(ys)});
    const auto fitted = make_pca(1)->fit(t);
    const Table z = fitted->transform(t);
    REQUIRE(z.n_cols() == 1);

    // reconstruction via the single component is exact for rank-1 data
    // (the component is (1,1)/sqrt(2) up to the fixed sign)
    double total_var = 0.0, proj_var = 0.0, mean_z = 0.0;
    for (std::size_t r = 0; r < 10; ++r) mean_z += z.column(0).number(r);
    mean_z /= 10.0;
    for (std::size_t r = 0; r < 10; ++r) {
        proj_var += std::pow(z.column(0).number(r) - mean_z, 2);
        total_var += std::pow(xs[r] - 4.5, 2) + std::pow(ys[r] - 4.5, 2);
    }
    CHECK(proj_var == doctest::Approx(total_var).epsilon(1e-9));

    // reconstruction error: project back along the component
    const double c = 1.0 / std::sqrt(2.0);
    for (std::size_t r = 0; r < 10; ++r) {
        const double rec_x = 4.5 + z.column(0).number(r) * c;
        CHECK(rec_x == doctest::Approx(xs[r]).epsilon(1e-9));
    }
}

TEST_CASE("pca with k = n_features preserves pairwise distances") {
    SplitMix64 rng(3);
    const Matrix m = testsup::random_matrix(12, 4, rng);
    const Table t = testsup::table_from(m);
    const Table z = make_pca(4)->fit(t)->transform(t);
    for (std::size_t a = 0; a < 12; ++a)
        for (std::size_t b = a + 1; b < 12; ++b) {
            double d_in = 0.0, d_out = 0.0;
            for (std::size_t j = 0; j < 4; ++j) {
                d_in += std::pow(m.at(a, j) - m.at(b, j), 2);
                d_out += std::pow(z.column(j).number(a) - z.column(j).number(b), 2);
            }
            CHECK(std::sqrt(d_out) == doctest::Approx(std::sqrt(d_in)).epsilon(1e-9));
        }
}

TEST_CASE("pca eigen-structure on a random 20x5 matrix") {
    SplitMix64 rng(9);
    const Matrix m = testsup::random_matrix(20, 5, rng);
    const Table t = testsup::table_from(m);
    const auto fitted = make_pca(5)->fit(t);
    const Table z = fitted->transform(t);

    // component variances: non-increasing; their sum equals the total variance
    std::vector<double> vars(5, 0.0);
    double total = 0.0;
    std::vector<double> means(5, 0.0), zmeans(5, 0.0);
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t r = 0; r < 20; ++r) {
            means[j] += m.at(r, j);
            zmeans[j] += z.column(j).number(r);
        }
        means[j] /= 20.0;
        zmeans[j] /= 20.0;
    }
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t r = 0; r < 20; ++r) {
            vars[j] += std::pow(z.column(j).number(r) - zmeans[j], 2) / 19.0;
            total += std::pow(m.at(r, j) - means[j], 2) / 19.0;
        }
    }
    double var_sum = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
        var_sum += vars[j];
        if (j) CHECK(vars[j] <= vars[j - 1] + 1e-9);
    }
    CHECK(var_sum == doctest::Approx(total).epsilon(1e-9));

    // projection columns are uncorrelated (orthonormal components)
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = a + 1; b < 5; ++b) {
            double dot = 0.0;
            for (std::size_t r = 0; r < 20; ++r)
                dot += (z.column(a).number(r) - zmeans[a]) * (z.column(b).number(r) - zmeans[b]);
            CHECK(std::abs(dot / 19.0) < 1e-9);
        }
}

TEST_CASE("pca rejects out-of-range component counts") {
    const Table t = testsup::table_from(Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}}));
    CHECK(error_code_of([&] { make_pca(3)->fit(t); }) == ErrorCode::InvalidComponents);
    CHECK(error_code_of([&] { make_pca(0)->fit(t); }) == ErrorCode::InvalidComponents);
}

TEST_CASE("one-hot expands categories seen at fit") {
    const Table train = one_categorical({"a", "b", "a"});
    const auto fitted = make_one_hot()->fit(train);
    const Table out = fitted->transform(train);
    REQUIRE(out.n_cols() == 2);
    CHECK(out.schema()[0].name == "c=a");
    CHECK(out.schema()[1].name == "c=b");
    CHECK(out.column(0).numbers() == std::vector<double>{1, 0, 1});
    CHECK(out.column(1).numbers() == std::vector<double>{0, 1, 0});

    const Table unseen = one_categorical({"c"});
    const Table u = fitted->transform(unseen);
    CHECK(u.column(0).number(0) == 0.0);
    CHECK(u.column(1).number(0) == 0.0);
}

TEST_CASE("one-hot passes numeric tables through unchanged") {
    const Table t = testsup::table_from(Matrix::from_rows({{1, 2}, {3, 4}}));
    const Table out = make_one_hot()->fit(t)->transform(t);
    CHECK(out.schema() == t.schema());
    CHECK(out.column(0).numbers() == t.column(0).numbers());
}

TEST_CASE("stratified split reproduces the 537/231 shape on the bundled data") {
    const auto y = pima_labels();
    const StratifiedSplit s = stratified_split(y, {0.7, 123, true});
    CHECK(s.train_indices.size() == 537);  // floor(0.7*500) + floor(0.7*268)
    CHECK(s.test_indices.size() == 231);
    std::size_t train_pos = 0;
    for (std::size_t i : s.train_indices) train_pos += static_cast<std::size_t>(y[i]);
    CHECK(train_pos == 187);
}

TEST_CASE("stratified split: 4 balanced rows at 0.5 -> one of each class per side") {
    const std::vector<int> y = {0, 1, 0, 1};
    const StratifiedSplit s = stratified_split(y, {0.5, 9, true});
    REQUIRE(s.train_indices.size() == 2);
    REQUIRE(s.test_indices.size() == 2);
    CHECK(y[s.train_indices[0]] + y[s.train_indices[1]] == 1);
    CHECK(y[s.test_indices[0]] + y[s.test_indices[1]] == 1);
}

TEST_CASE("split determinism: same seed -> same sets; partition is exact") {
    SplitMix64 rng(21);
    const auto y = testsup::random_labels(101, rng);
    const StratifiedSplit a = stratified_split(y, {0.66, 42, true});
    const StratifiedSplit b = stratified_split(y, {0.66, 42, true});
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.test_indices == b.test_indices);

    const StratifiedSplit c = stratified_split(y, {0.66, 43, true});
    CHECK(a.train_indices != c.train_indices);

    std::set<std::size_t> all(a.train_indices.begin(), a.train_indices.end());
    all.insert(a.test_indices.begin(), a.test_indices.end());
    CHECK(all.size() == y.size());
    CHECK(a.train_indices.size() + a.test_indices.size() == y.size());
}

TEST_CASE("stratified split needs 2 members per class") {
    CHECK(error_code_of([] { stratified_split({0, 0, 0, 1}, {0.5, 1, true}); }) ==
          ErrorCode::CannotStratify);
}

TEST_CASE("stratified k-fold on the bundled labels: 10 balanced folds") {
    const auto y = pima_labels();
    const FoldPlan plan = stratified_kfold(y, 10, 123);
    for (std::size_t f = 0; f < 10; ++f) {
        const auto idx = plan.fold_indices(f);
        CHECK((idx.size() == 76 || idx.size() == 77));
        std::size_t pos = 0;
        for (std::size_t i : idx) pos += static_cast<std::size_t>(y[i]);
        CHECK(idx.size() - pos == 50);  // 500 negatives / 10 folds exactly
        CHECK((pos == 26 || pos == 27));
    }
}

TEST_CASE("k-fold on [0,1,0,1] with k=2: one of each class per fold") {
    const FoldPlan plan = stratified_kfold({0, 1, 0, 1}, 2, 5);
    for (std::size_t f = 0; f < 2; ++f) {
        const auto idx = plan.fold_indices(f);
        REQUIRE(idx.size() == 2);
        CHECK(idx[0] % 2 != idx[1] % 2);  // labels alternate by index parity
    }
}

TEST_CASE("k-fold partition: disjoint folds covering every index") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = 2 + rng.next_below(6);
        std::vector<int> y;
        for (;;) {
            y = testsup::random_labels(k + 5 + rng.next_below(60), rng);
            std::size_t pos = 0;
            for (int v : y) pos += static_cast<std::size_t>(v);
            if (pos >= k && y.size() - pos >= k) break;
        }
        const FoldPlan plan = stratified_kfold(y, k, rng.next());
        std::set<std::size_t> seen;
        std::size_t total = 0;
        for (std::size_t f = 0; f < k; ++f) {
            const auto idx = plan.fold_indices(f);
            total += idx.size();
            seen.insert(idx.begin(), idx.end());
        }
        CHECK(total == y.size());
        CHECK(seen.size() == y.size());
    }
}

TEST_CASE("k-fold class smaller than k -> CannotStratify") {
    CHECK(error_code_of([] { stratified_kfold({0, 0, 0, 1, 1}, 3, 1); }) ==
          ErrorCode::CannotStratify);
}

TEST_CASE("fold sizes differ by at most one, per class and overall") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = 2 + rng.next_below(8);
        std::vector<int> y;
        for (;;) {
            y = testsup::random_labels(2 * k + rng.next_below(80), rng);
            std::size_t pos = 0;
            for (int v : y) pos += static_cast<std::size_t>(v);
            if (pos >= k && y.size() - pos >= k) break;
        }
        const FoldPlan plan = stratified_kfold(y, k, rng.next());
        std::vector<std::size_t> sizes(k, 0), pos_counts(k, 0);
        for (std::size_t i = 0; i < y.size(); ++i) {
            ++sizes[plan.assignments()[i]];
            if (y[i]) ++pos_counts[plan.assignments()[i]];
        }
        const auto [smin, smax] = std::minmax_element(sizes.begin(), sizes.end());
        CHECK(*smax - *smin <= 1);
        const auto [pmin, pmax] = std::minmax_element(pos_counts.begin(), pos_counts.end());
        CHECK(*pmax - *pmin <= 1);
    }
}

}  // TEST_SUITE
