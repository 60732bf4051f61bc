#include "autoflow/pipeline.hpp"

#include <unordered_set>

#include "autoflow/error.hpp"

namespace autoflow {

Stage Stage::transform(std::string id, TransformerPtr t) {
    Stage s;
    s.id = std::move(id);
    s.transformer = std::move(t);
    return s;
}

Stage Stage::estimate(std::string id, Estimator e) {
    Stage s;
    s.id = std::move(id);
    s.estimator = std::move(e);
    return s;
}

bool Pipeline::has_estimator() const {
    return !stages_.empty() && stages_.back().is_estimator();
}

const Estimator& Pipeline::estimator() const {
    if (!has_estimator()) fail(ErrorCode::NotAnEstimator, "pipeline has no estimator stage");
    return *stages_.back().estimator;
}

Pipeline make_pipeline(std::vector<Stage> stages) {
    if (stages.empty()) fail(ErrorCode::EmptyInput, "pipeline needs at least one stage");
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (stages[i].id.empty()) fail(ErrorCode::DuplicateStage, "stage id must be non-empty");
        if (!ids.insert(stages[i].id).second)
            fail(ErrorCode::DuplicateStage, "duplicate stage id '" + stages[i].id + "'");
        if (stages[i].is_estimator() && i + 1 != stages.size())
            fail(ErrorCode::InvalidOrder,
                 "estimator stage '" + stages[i].id + "' must be last");
        if (!stages[i].is_estimator() && !stages[i].transformer)
            fail(ErrorCode::BadConfig, "stage '" + stages[i].id + "' has no operation");
    }
    Pipeline p;
    p.stages_ = std::move(stages);
    return p;
}

namespace {

void check_schema(const std::vector<ColumnSchema>& expected, const Table& x) {
    if (x.schema() != expected)
        fail(ErrorCode::SchemaMismatch,
             "input schema differs from the schema seen at fit time");
}

}  // namespace

FittedPipeline FittedPipeline::assemble(std::vector<FittedStage> stages,
                                        std::vector<ColumnSchema> feature_names_in,
                                        std::vector<ColumnSchema> estimator_input_schema) {
    FittedPipeline fp;
    fp.stages_ = std::move(stages);
    fp.feature_names_in_ = std::move(feature_names_in);
    fp.estimator_input_schema_ = std::move(estimator_input_schema);
    return fp;
}

const FittedModel* FittedPipeline::model() const {
    if (stages_.empty() || !stages_.back().model) return nullptr;
    return stages_.back().model.get();
}

bool FittedPipeline::supports_proba() const {
    const FittedModel* m = model();
    return m != nullptr && m->supports_proba();
}

Table FittedPipeline::transform(const Table& x) const {
    check_schema(feature_names_in_, x);
    Table cur = x;
    for (const auto& s : stages_)
        if (s.transformer) cur = s.transformer->transform(cur);
    return cur;
}

std::vector<int> FittedPipeline::predict(const Table& x) const {
    const FittedModel* m = model();
    if (!m) fail(ErrorCode::NotAnEstimator, "pipeline has no estimator stage");
    return m->predict(to_matrix(transform(x)));
}

std::vector<double> FittedPipeline::predict_proba(const Table& x) const {
    const FittedModel* m = model();
    if (!m) fail(ErrorCode::NotAnEstimator, "pipeline has no estimator stage");
    return m->scores(to_matrix(transform(x)));
}

FittedPipeline FittedPipeline::estimator_only() const {
    const FittedModel* m = model();
    if (!m) fail(ErrorCode::NotAnEstimator, "pipeline has no estimator stage");
    std::vector<FittedStage> only = {stages_.back()};
    return assemble(std::move(only), estimator_input_schema_, estimator_input_schema_);
}

FittedPipeline fit(const Pipeline& p, const Table& x, const std::vector<int>& y,
                   std::uint64_t seed) {
    if (x.n_rows() == 0) fail(ErrorCode::EmptyInput, "cannot fit on an empty table");
    if (x.n_rows() != y.size())
        fail(ErrorCode::SchemaMismatch, "feature rows and label count differ");

    std::vector<FittedStage> fitted;
    fitted.reserve(p.stages().size());
    Table cur = x;
    for (const auto& stage : p.stages()) {
        try {
            if (stage.is_estimator()) {
                FittedStage fs;
                fs.id = stage.id;
                fs.model = fit_model(*stage.estimator, to_matrix(cur), y, seed);
                fitted.push_back(std::move(fs));
            } else {
                FittedStage fs;
                fs.id = stage.id;
                fs.transformer = stage.transformer->fit(cur);
                cur = fs.transformer->transform(cur);
                fitted.push_back(std::move(fs));
            }
        } catch (const Error& e) {
            throw Error(e.code(), "stage '" + stage.id + "': " + e.what());
        }
    }
    return FittedPipeline::assemble(std::move(fitted), x.schema(), cur.schema());
}

}  // namespace autoflow
