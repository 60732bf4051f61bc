#include <cmath>

#include "autoflow/pipeline.hpp"
#include "autoflow/preprocess.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace autoflow;
using testsup::error_code_of;

TEST_SUITE("pipeline") {

TEST_CASE("make_pipeline: the three-stage scaler/pca/estimator form is valid") {
    const Pipeline p = make_pipeline({Stage::transform("sc", make_standard_scaler()),
                                      Stage::transform("pca", make_pca(2)),
                                      Stage::estimate("clf", create_estimator(ModelId::lr))});
    CHECK(p.stages().size() == 3);
    CHECK(p.has_estimator());
}

TEST_CASE("make_pipeline: single estimator is valid; bad orders are not") {
    CHECK(make_pipeline({Stage::estimate("clf", create_estimator(ModelId::lr))}).has_estimator());
    CHECK(error_code_of([] {
              make_pipeline({Stage::estimate("clf", create_estimator(ModelId::lr)),
                             Stage::transform("sc", make_standard_scaler())});
          }) == ErrorCode::InvalidOrder);
    CHECK(error_code_of([] {
              make_pipeline({Stage::transform("a", make_standard_scaler()),
                             Stage::transform("a", make_standard_scaler())});
          }) == ErrorCode::DuplicateStage);
    CHECK(error_code_of([] { make_pipeline({}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("fit chains stages: [T1, T2, E] equals [T2, E] on T1's output") {
    SplitMix64 rng(50);
    const Matrix m = testsup::random_matrix(40, 8, rng);
    const Table x = testsup::table_from(m);
    const auto y = testsup::signal_labels(m, rng);

    const FittedPipeline full = fit(
        make_pipeline({Stage::transform("sc", make_standard_scaler()),
                       Stage::transform("pca", make_pca(2)),
                       Stage::estimate("clf", create_estimator(ModelId::lr))}),
        x, y, 1);

    const Table t1 = make_standard_scaler()->fit(x)->transform(x);
    const FittedPipeline tail =
        fit(make_pipeline({Stage::transform("pca", make_pca(2)),
                           Stage::estimate("clf", create_estimator(ModelId::lr))}),
            t1, y, 1);

    CHECK(full.predict(x) == tail.predict(t1));
    CHECK(full.predict_proba(x) == tail.predict_proba(t1));
    CHECK(full.estimator_input_schema().size() == 2);  // two principal components
}

TEST_CASE("empty transformer prefix equals fitting the estimator directly") {
    SplitMix64 rng(51);
    const Matrix m = testsup::random_matrix(30, 3, rng);
    const Table x = testsup::table_from(m);
    const auto y = testsup::signal_labels(m, rng);

    const FittedPipeline p =
        fit(make_pipeline({Stage::estimate("clf", create_estimator(ModelId::lr))}), x, y, 7);
    const FittedModelPtr direct = fit_model(create_estimator(ModelId::lr), m, y, 7);
    CHECK(p.predict(x) == direct->predict(m));
    CHECK(p.predict_proba(x) == direct->scores(m));
}

TEST_CASE("scaler-only pipeline: output mean 0, population std 1") {
    const Table x = testsup::table_from(Matrix::from_rows({{1.0}, {2.0}, {3.0}}));
    const std::vector<int> y = {0, 1, 0};
    const FittedPipeline p =
        fit(make_pipeline({Stage::transform("sc", make_standard_scaler())}), x, y);
    const Table out = p.transform(x);
    double mean = 0.0;
    for (std::size_t r = 0; r < 3; ++r) mean += out.column(0).number(r);
    mean /= 3.0;
    CHECK(std::abs(mean) < 1e-12);
    double ss = 0.0;
    for (std::size_t r = 0; r < 3; ++r) ss += std::pow(out.column(0).number(r) - mean, 2);
    CHECK(std::sqrt(ss / 3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transform(train) after fit(train) is what the estimator saw") {
    SplitMix64 rng(52);
    const Matrix m = testsup::random_matrix(20, 4, rng);
    const Table x = testsup::table_from(m);
    const auto y = testsup::signal_labels(m, rng);
    const FittedPipeline p = fit(
        make_pipeline({Stage::transform("sc", make_standard_scaler()),
                       Stage::estimate("clf", create_estimator(ModelId::lr))}),
        x, y);
    const Table seen = p.transform(x);
    CHECK(seen.schema() == p.estimator_input_schema());
    // deterministic re-application: predicting on train equals scoring "seen"
    CHECK(p.predict(x) == p.model()->predict(to_matrix(seen)));
}

TEST_CASE("scaler uses train statistics on test data") {
    const Table train = testsup::table_from(Matrix::from_rows({{0.0}, {2.0}}));
    const Table test = testsup::table_from(Matrix::from_rows({{10.0}, {12.0}}));
    const FittedPipeline p =
        fit(make_pipeline({Stage::transform("sc", make_standard_scaler())}), train, {0, 1});
    const Table out = p.transform(test);
    // (10-1)/1 and (12-1)/1: clearly not mean-0 on the test set
    CHECK(out.column(0).number(0) == doctest::Approx(9.0));
    CHECK(out.column(0).number(1) == doctest::Approx(11.0));
}

TEST_CASE("fit leaves its inputs untouched") {
    SplitMix64 rng(53);
    const Matrix m = testsup::random_matrix(15, 3, rng);
    const Table x = testsup::table_from(m);
    const auto y = testsup::signal_labels(m, rng);
    const Table x_before = x;
    const auto y_before = y;
    (void)fit(make_pipeline({Stage::transform("sc", make_standard_scaler()),
                             Stage::estimate("clf", create_estimator(ModelId::lr))}),
              x, y);
    CHECK(x.schema() == x_before.schema());
    for (std::size_t c = 0; c < x.n_cols(); ++c)
        CHECK(x.column(c).numbers() == x_before.column(c).numbers());
    CHECK(y == y_before);
}

TEST_CASE("predict output: one label in {0,1} per row") {
    SplitMix64 rng(54);
    const Matrix m = testsup::random_matrix(25, 3, rng);
    const Table x = testsup::table_from(m);
    const auto y = testsup::signal_labels(m, rng);
    for (ModelId id : {ModelId::lr, ModelId::ridge, ModelId::dt, ModelId::knn, ModelId::dummy}) {
        const FittedPipeline p =
            fit(make_pipeline({Stage::estimate("clf", create_estimator(id))}), x, y, 3);
        const auto preds = p.predict(x);
        REQUIRE(preds.size() == x.n_rows());
        for (int v : preds) CHECK((v == 0 || v == 1));
    }
}

TEST_CASE("schema mismatch and missing estimator are reported") {
    const Table x = testsup::table_from(Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}}));
    const FittedPipeline p =
        fit(make_pipeline({Stage::transform("sc", make_standard_scaler())}), x, {0, 1});
    const Table other = testsup::table_from(Matrix::from_rows({{1.0}, {2.0}}));
    CHECK(error_code_of([&] { p.transform(other); }) == ErrorCode::SchemaMismatch);
    CHECK(error_code_of([&] { p.predict(x); }) == ErrorCode::NotAnEstimator);
}

TEST_CASE("ridge pipeline refuses predict_proba") {
    SplitMix64 rng(55);
    const Matrix m = testsup::random_matrix(20, 2, rng);
    const Table x = testsup::table_from(m);
    const auto y = testsup::signal_labels(m, rng);
    const FittedPipeline p =
        fit(make_pipeline({Stage::estimate("clf", create_estimator(ModelId::ridge))}), x, y);
    CHECK(error_code_of([&] { p.predict_proba(x); }) == ErrorCode::NoProbability);
}

TEST_CASE("stage failures carry the stage id") {
    const Table cat = Table({{"c", ColumnKind::Categorical}},
                            {Column::categorical({"a", "b"})});
    try {
        fit(make_pipeline({Stage::transform("sc", make_standard_scaler())}), cat, {0, 1});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NeedsEncoding);
        CHECK(std::string(e.what()).find("'sc'") != std::string::npos);
    }
}

}  // TEST_SUITE
