#include <cstdio>
#include <filesystem>
#include <fstream>

#include "autoflow/experiment.hpp"
#include "autoflow/report.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace autoflow;
using testsup::error_code_of;

namespace {

Experiment pima_experiment(std::uint64_t session = 123) {
    ExperimentConfig cfg;
    cfg.session_id = session;
    cfg.target.column = "Class variable";
    return setup(read_csv(testsup::pima_path()), cfg);
}

bool report_has(const Experiment& exp, const std::string& desc, const std::string& value) {
    for (const auto& row : exp.report())
        if (row.description == desc && row.value == value) return true;
    return false;
}

// a separable 24-row table: class decided by the first feature's sign
Table toy_table(std::vector<int>& y, std::size_t n = 24) {
    SplitMix64 rng(1234);
    Matrix m(n, 2);
    y.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = i % 2 == 0;
        m.at(i, 0) = (pos ? 4.0 : -4.0) + testsup::gaussian(rng) * 0.2;
        m.at(i, 1) = testsup::gaussian(rng);
        y[i] = pos ? 1 : 0;
    }
    return testsup::table_from(m);
}

Table with_target(const Table& features, const std::vector<int>& y) {
    std::vector<ColumnSchema> schema = features.schema();
    schema.push_back({"y", ColumnKind::Numeric});
    std::vector<Column> cols;
    for (std::size_t c = 0; c < features.n_cols(); ++c) cols.push_back(features.column(c));
    std::vector<double> target(y.begin(), y.end());
    cols.push_back(Column::numeric(std::move(target)));
    return Table(std::move(schema), std::move(cols));
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("setup on the bundled data reproduces the reference configuration") {
    const Experiment exp = pima_experiment();
    CHECK(report_has(exp, "Original data shape", "(768, 9)"));
    CHECK(report_has(exp, "Transformed train set shape", "(537, 9)"));
    CHECK(report_has(exp, "Transformed test set shape", "(231, 9)"));
    CHECK(report_has(exp, "Fold Number", "10"));
    CHECK(report_has(exp, "Fold Generator", "StratifiedKFold"));
    CHECK(report_has(exp, "Session id", "123"));
    CHECK(report_has(exp, "Numeric features", "8"));

    CHECK(exp.train_features().n_rows() == 537);
    CHECK(exp.holdout_features().n_rows() == 231);
    std::size_t train_pos = 0, holdout_pos = 0;
    for (int v : exp.train_labels()) train_pos += static_cast<std::size_t>(v);
    for (int v : exp.holdout_labels()) holdout_pos += static_cast<std::size_t>(v);
    CHECK(train_pos == 187);
    CHECK(holdout_pos == 81);
}

TEST_CASE("setup splits a balanced 10-row toy set 5/5 with stratification") {
    std::vector<int> y;
    const Table features = toy_table(y, 10);
    ExperimentConfig cfg;
    cfg.target.column = "y";
    cfg.train_size = 0.5;
    cfg.fold_number = 2;
    const Experiment exp = setup(with_target(features, y), cfg);
    CHECK(exp.train_features().n_rows() == 5);
    CHECK(exp.holdout_features().n_rows() == 5);
    std::size_t pos = 0;
    for (int v : exp.train_labels()) pos += static_cast<std::size_t>(v);
    CHECK(pos == 2);  // floor(0.5 * 5 positives)
}

TEST_CASE("setup is deterministic in the session id") {
    const Experiment a = pima_experiment(123);
    const Experiment b = pima_experiment(123);
    const Experiment c = pima_experiment(124);
    CHECK(a.train_indices() == b.train_indices());
    CHECK(a.fold_plan().assignments() == b.fold_plan().assignments());
    CHECK(a.train_indices() != c.train_indices());
}

TEST_CASE("compare with include=[dummy]: single row, dummy selected") {
    const Experiment exp = pima_experiment();
    CompareOptions opts;
    opts.include = {ModelId::dummy};
    const CompareResult r = compare_models(exp, opts);
    REQUIRE(r.board.rows.size() == 1);
    CHECK(r.board.rows[0].id == ModelId::dummy);
    CHECK(r.board.selected == std::vector<ModelId>{ModelId::dummy});
    REQUIRE(r.best.size() == 1);
    CHECK(r.best[0].model()->id() == ModelId::dummy);
    // the bundled data baseline: majority rate 0.6518 per the fold sizes
    CHECK(r.board.rows[0].mean.accuracy == doctest::Approx(0.6518).epsilon(0.002));
    CHECK(r.board.rows[0].mean.auc == 0.5);
}

TEST_CASE("sorting by AUC sinks the no-probability models") {
    const Experiment exp = pima_experiment();
    CompareOptions opts;
    opts.sort = "auc";
    opts.include = {ModelId::ridge, ModelId::svm, ModelId::dummy, ModelId::nb};
    const CompareResult r = compare_models(exp, opts);
    REQUIRE(r.board.rows.size() == 4);
    // the two AUC-0 models occupy the bottom, tie broken by id string
    CHECK(r.board.rows[2].id == ModelId::ridge);
    CHECK(r.board.rows[3].id == ModelId::svm);
    CHECK(r.board.rows[2].mean.auc == 0.0);
    CHECK(r.board.rows[3].mean.auc == 0.0);
}

TEST_CASE("leaderboard is sorted non-increasing with the id tie-break") {
    const Experiment exp = pima_experiment();
    CompareOptions opts;
    opts.include = {ModelId::lr, ModelId::dt, ModelId::dummy, ModelId::nb};
    opts.n_select = 2;
    const CompareResult r = compare_models(exp, opts);
    for (std::size_t i = 1; i < r.board.rows.size(); ++i) {
        const double prev = metric_by_name(r.board.rows[i - 1].mean, "accuracy");
        const double cur = metric_by_name(r.board.rows[i].mean, "accuracy");
        CHECK(prev >= cur);
    }
    REQUIRE(r.board.selected.size() == 2);
    CHECK(r.board.selected[0] == r.board.rows[0].id);
    CHECK(r.board.selected[1] == r.board.rows[1].id);
}

TEST_CASE("include and exclude must be disjoint; empty set -> NothingToCompare") {
    const Experiment exp = pima_experiment();
    CompareOptions both;
    both.include = {ModelId::lr};
    both.exclude = {ModelId::lr};
    CHECK(error_code_of([&] { compare_models(exp, both); }) == ErrorCode::BadConfig);

    CompareOptions none;
    none.include = {ModelId::lr};
    none.exclude = {};
    none.include.clear();
    for (ModelId id : kAllModels) none.exclude.push_back(id);
    CHECK(error_code_of([&] { compare_models(exp, none); }) == ErrorCode::NothingToCompare);
}

TEST_CASE("create_model(lr) on the bundled data lands in the reference window") {
    const Experiment exp = pima_experiment();
    const CreateResult r = create_model(exp, ModelId::lr);
    REQUIRE(r.report.fold_rows.size() == 10);
    CHECK(r.report.mean_row.accuracy > 0.74);
    CHECK(r.report.mean_row.accuracy < 0.80);
    CHECK(r.report.mean_row.kappa > 0.40);
    CHECK(r.report.mean_row.kappa < 0.52);
}

TEST_CASE("create_model on a separable toy set: every fold row is perfect") {
    std::vector<int> y;
    const Table features = toy_table(y, 40);
    ExperimentConfig cfg;
    cfg.target.column = "y";
    cfg.fold_number = 4;
    const Experiment exp = setup(with_target(features, y), cfg);
    const CreateResult r = create_model(exp, ModelId::dt);
    for (const auto& row : r.report.fold_rows) CHECK(row.accuracy == 1.0);
}

TEST_CASE("create_model with an external framework name -> UnknownModel") {
    const Experiment exp = pima_experiment();
    CHECK(error_code_of([&] { create_model(exp, "xgboost"); }) == ErrorCode::UnknownModel);
}

TEST_CASE("tune_model: a one-point grid returns the documented defaults") {
    std::vector<int> y;
    const Table features = toy_table(y, 30);
    ExperimentConfig cfg;
    cfg.target.column = "y";
    cfg.fold_number = 3;
    const Experiment exp = setup(with_target(features, y), cfg);
    const TuneResult r = tune_model(exp, ModelId::lda, 10);
    CHECK(r.chosen.empty());
}

TEST_CASE("tune_model beats or matches the default when the default is sampled") {
    std::vector<int> y;
    const Table features = toy_table(y, 40);
    ExperimentConfig cfg;
    cfg.target.column = "y";
    cfg.fold_number = 4;
    const Experiment exp = setup(with_target(features, y), cfg);
    // lr's grid contains C = 1.0 (the default); n_iter covers the whole grid
    const TuneResult tuned = tune_model(exp, ModelId::lr, tuning_grid(ModelId::lr).size());
    const CreateResult dflt = create_model(exp, ModelId::lr);
    CHECK(tuned.report.mean_row.accuracy >= dflt.report.mean_row.accuracy);
}

TEST_CASE("tune_model picks the k the exhaustive oracle prefers") {
    // three tight clusters: 0-cluster, 1-cluster, 0-cluster; k=3 stays inside
    // a cluster, k=11 reaches across and drowns the middle class
    SplitMix64 rng(88);
    Matrix m(18, 1);
    std::vector<int> y(18);
    for (std::size_t i = 0; i < 18; ++i) {
        const std::size_t cluster = i / 6;
        m.at(i, 0) = static_cast<double>(cluster) * 10.0 + 0.05 * testsup::gaussian(rng);
        y[i] = cluster == 1 ? 1 : 0;
    }
    ExperimentConfig cfg;
    cfg.target.column = "y";
    cfg.fold_number = 3;
    cfg.train_size = 0.8;
    const Experiment exp = setup(with_target(testsup::table_from(m), y), cfg);

    // oracle: score the whole documented grid exhaustively
    double best_score = -1.0;
    double best_k = 0.0;
    for (const ParamMap& params : tuning_grid(ModelId::knn)) {
        const CreateResult r = create_model(exp, ModelId::knn, params);
        const double score = r.report.mean_row.accuracy;
        if (score > best_score) {
            best_score = score;
            best_k = params.at("k");
        }
    }
    CHECK(best_k == 3.0);

    const TuneResult tuned = tune_model(exp, ModelId::knn, tuning_grid(ModelId::knn).size());
    CHECK(tuned.chosen.at("k") == best_k);
    CHECK(tuned.report.mean_row.accuracy == best_score);
}

TEST_CASE("predict_model: dummy holdout accuracy equals the negative rate") {
    const Experiment exp = pima_experiment();
    const CreateResult dummy = create_model(exp, ModelId::dummy);
    const PredictResult pred = predict_model(exp, dummy.pipeline);
    CHECK(pred.predictions.size() == 231);
    CHECK(pred.holdout.accuracy == doctest::Approx(150.0 / 231.0).epsilon(1e-12));
    CHECK(pred.holdout.recall == 0.0);
}

TEST_CASE("predict_model on a separable toy set is perfect on the holdout") {
    std::vector<int> y;
    const Table features = toy_table(y, 40);
    ExperimentConfig cfg;
    cfg.target.column = "y";
    cfg.fold_number = 3;
    const Experiment exp = setup(with_target(features, y), cfg);
    const CreateResult r = create_model(exp, ModelId::dt);
    const PredictResult pred = predict_model(exp, r.pipeline);
    CHECK(pred.holdout.accuracy == 1.0);
}

TEST_CASE("save/load roundtrip: bit-identical holdout predictions and scores") {
    const Experiment exp = pima_experiment();
    const std::string path = temp_path("autoflow_roundtrip.afpl");
    for (ModelId id : {ModelId::lr, ModelId::ridge, ModelId::dt, ModelId::dummy}) {
        CAPTURE(model_id_string(id));
        const CreateResult r = create_model(exp, id);
        const std::vector<int> before = r.pipeline.predict(exp.holdout_features());
        save_model(r.pipeline, path, false, &exp.config());
        const LoadedModel loaded = load_model(path);
        CHECK(loaded.pipeline.predict(exp.holdout_features()) == before);
        if (r.pipeline.supports_proba())
            CHECK(loaded.pipeline.predict_proba(exp.holdout_features()) ==
                  r.pipeline.predict_proba(exp.holdout_features()));
        CHECK(loaded.has_config);
        CHECK(loaded.config.session_id == 123);
    }
    std::remove(path.c_str());
}

TEST_CASE("model_only strips preprocessing; raw missing cells then fail loudly") {
    // train a pipeline on data whose training split exercises imputation
    const Table data = read_csv(testsup::pima_path());
    ExperimentConfig cfg;
    cfg.target.column = "Class variable";
    const Experiment exp = setup(data, cfg);
    const CreateResult r = create_model(exp, ModelId::lr);

    const std::string path = temp_path("autoflow_model_only.afpl");
    save_model(r.pipeline, path, true, &exp.config());
    const LoadedModel loaded = load_model(path);
    CHECK(loaded.model_only);
    REQUIRE(loaded.pipeline.stages().size() == 1);

    // a probe row with a missing cell: the full pipeline imputes it away,
    // the bare estimator refuses it
    std::vector<ColumnSchema> schema = exp.train_features().schema();
    std::vector<Column> cols;
    for (std::size_t c = 0; c < exp.train_features().n_cols(); ++c) {
        std::vector<double> v = {1.0};
        std::vector<std::uint8_t> miss = {c == 2 ? std::uint8_t{1} : std::uint8_t{0}};
        cols.push_back(Column::numeric(std::move(v), std::move(miss)));
    }
    const Table probe(schema, std::move(cols));
    CHECK(r.pipeline.predict(probe).size() == 1);  // full flow imputes
    CHECK(error_code_of([&] { loaded.pipeline.predict(probe); }) == ErrorCode::MissingValues);
    std::remove(path.c_str());
}

TEST_CASE("corrupt and truncated files are rejected, never crash") {
    const Experiment exp = pima_experiment();
    const CreateResult r = create_model(exp, ModelId::dummy);
    const std::string path = temp_path("autoflow_corrupt.afpl");
    save_model(r.pipeline, path, false, &exp.config());

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    auto write_bytes = [&](const std::string& b) {
        std::ofstream out(path, std::ios::binary);
        out << b;
    };

    for (std::size_t cut : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4},
                            std::size_t{5}, std::size_t{6}, std::size_t{10}, bytes.size() / 2,
                            bytes.size() - 1}) {
        write_bytes(bytes.substr(0, cut));
        try {
            load_model(path);
            FAIL("truncated file accepted at cut ", cut);
        } catch (const Error& e) {
            CHECK((e.code() == ErrorCode::NotAModelFile ||
                   e.code() == ErrorCode::UnsupportedVersion));
        }
    }

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    write_bytes(bad_magic);
    CHECK(error_code_of([&] { load_model(path); }) == ErrorCode::NotAModelFile);

    std::string bad_version = bytes;
    bad_version[4] = char(0xff);
    write_bytes(bad_version);
    CHECK(error_code_of([&] { load_model(path); }) == ErrorCode::UnsupportedVersion);
    std::remove(path.c_str());
}

TEST_CASE("holdout rows never influence fitted state") {
    std::vector<int> y;
    const Table features = toy_table(y, 40);
    const Table data = with_target(features, y);
    ExperimentConfig cfg;
    cfg.target.column = "y";
    cfg.fold_number = 3;
    const Experiment exp = setup(data, cfg);

    // poison the holdout rows' features (labels untouched, so the split and
    // the fold plan are identical), then refit
    std::vector<Column> cols;
    for (std::size_t c = 0; c < data.n_cols(); ++c) {
        std::vector<double> v = data.column(c).numbers();
        if (data.schema()[c].name != "y")
            for (std::size_t i : exp.holdout_indices()) v[i] = v[i] * 10.0 + 7.0;
        cols.push_back(Column::numeric(std::move(v)));
    }
    const Table poisoned(data.schema(), std::move(cols));
    const Experiment exp2 = setup(poisoned, cfg);
    CHECK(exp2.train_indices() == exp.train_indices());

    const CreateResult a = create_model(exp, ModelId::lr);
    const CreateResult b = create_model(exp2, ModelId::lr);
    const std::vector<double> sa = a.pipeline.predict_proba(exp.train_features());
    const std::vector<double> sb = b.pipeline.predict_proba(exp2.train_features());
    CHECK(sa == sb);  // bitwise: identical training data, identical fit
}

TEST_CASE("leaderboard CSV bytes are deterministic") {
    const Experiment exp = pima_experiment();
    CompareOptions opts;
    opts.include = {ModelId::lr, ModelId::dummy, ModelId::dt};
    const CompareResult a = compare_models(exp, opts);
    const CompareResult b = compare_models(pima_experiment(), opts);
    CHECK(leaderboard_csv(a.board) == leaderboard_csv(b.board));
}

}  // TEST_SUITE
