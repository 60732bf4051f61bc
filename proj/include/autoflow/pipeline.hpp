#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autoflow/models.hpp"
#include "autoflow/serialize.hpp"
#include "autoflow/tabular.hpp"

namespace autoflow {

/// A fitted feature-to-feature stage. Immutable once created, so fitted
/// pipelines can be shared across threads and reused across folds.
class FittedTransformer {
public:
    virtual ~FittedTransformer() = default;
    virtual std::string_view kind() const = 0;
    virtual Table transform(const Table& in) const = 0;
    virtual void save(serialize::FieldMap& f) const = 0;
};

using FittedTransformerPtr = std::shared_ptr<const FittedTransformer>;

/// An unfitted transformer specification; fit() learns state from a table
/// and returns the immutable fitted counterpart.
class Transformer {
public:
    virtual ~Transformer() = default;
    virtual std::string_view kind() const = 0;
    virtual FittedTransformerPtr fit(const Table& in) const = 0;
};

using TransformerPtr = std::shared_ptr<const Transformer>;

/// One named pipeline stage: either a transformer or the final estimator.
struct Stage {
    std::string id;
    TransformerPtr transformer;        // set for transformer stages
    std::optional<Estimator> estimator;  // set for the estimator stage

    static Stage transform(std::string id, TransformerPtr t);
    static Stage estimate(std::string id, Estimator e);
    bool is_estimator() const { return estimator.has_value(); }
};

/// Ordered stages: transformers, then at most one estimator in last position.
class Pipeline {
public:
    const std::vector<Stage>& stages() const { return stages_; }
    bool has_estimator() const;
    const Estimator& estimator() const;  // NotAnEstimator if absent

private:
    friend Pipeline make_pipeline(std::vector<Stage> stages);
    std::vector<Stage> stages_;
};

/// Validates ordering and id uniqueness (InvalidOrder / DuplicateStage).
Pipeline make_pipeline(std::vector<Stage> stages);

struct FittedStage {
    std::string id;
    FittedTransformerPtr transformer;  // exactly one of the two is set
    FittedModelPtr model;
};

/// A pipeline after fit: per-stage learned state plus a snapshot of the
/// input schema. predict/transform reject tables whose schema differs.
class FittedPipeline {
public:
    FittedPipeline() = default;  // empty shell; assemble() or fit() make real ones

    const std::vector<ColumnSchema>& feature_names_in() const { return feature_names_in_; }
    const std::vector<ColumnSchema>& estimator_input_schema() const { return estimator_input_schema_; }
    const std::vector<FittedStage>& stages() const { return stages_; }

    /// Applies the fitted transformers in order; the estimator is skipped.
    Table transform(const Table& x) const;

    std::vector<int> predict(const Table& x) const;
    std::vector<double> predict_proba(const Table& x) const;

    bool has_estimator() const { return model() != nullptr; }
    bool supports_proba() const;
    const FittedModel* model() const;

    /// The estimator stage alone, with the post-transform schema snapshot.
    FittedPipeline estimator_only() const;

    static FittedPipeline assemble(std::vector<FittedStage> stages,
                                   std::vector<ColumnSchema> feature_names_in,
                                   std::vector<ColumnSchema> estimator_input_schema);

private:
    std::vector<FittedStage> stages_;
    std::vector<ColumnSchema> feature_names_in_;
    std::vector<ColumnSchema> estimator_input_schema_;
};

/// Fits stage i on the output of stages 0..i-1; the estimator, if present,
/// is fit last on the fully transformed features. x and y are untouched.
FittedPipeline fit(const Pipeline& p, const Table& x, const std::vector<int>& y,
                   std::uint64_t seed = 0);

}  // namespace autoflow
