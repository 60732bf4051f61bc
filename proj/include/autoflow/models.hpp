#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autoflow/matrix.hpp"
#include "autoflow/serialize.hpp"

namespace autoflow {

/// The closed set of built-in binary classifiers.
enum class ModelId { lr, ridge, lda, qda, nb, knn, dt, rf, et, gbc, ada, svm, dummy };

inline constexpr std::array<ModelId, 13> kAllModels = {
    ModelId::lr,  ModelId::ridge, ModelId::lda, ModelId::qda, ModelId::nb,
    ModelId::knn, ModelId::dt,    ModelId::rf,  ModelId::et,  ModelId::gbc,
    ModelId::ada, ModelId::svm,   ModelId::dummy};

std::string_view model_id_string(ModelId id);
std::optional<ModelId> parse_model_id(std::string_view s);
std::string_view model_display_name(ModelId id);

/// ridge and svm decide by sign of a margin and expose no probability.
bool model_supports_proba(ModelId id);

using ParamMap = std::map<std::string, double>;

struct Estimator {
    ModelId id;
    ParamMap params;  // documented defaults merged with overrides
    bool supports_proba;
};

/// Merges overrides into the model's documented defaults.
/// Unknown model -> UnknownModel, unknown key -> UnknownParam.
Estimator create_estimator(ModelId id, const ParamMap& overrides = {});
Estimator create_estimator(std::string_view id, const ParamMap& overrides = {});

class FittedModel {
public:
    virtual ~FittedModel() = default;

    ModelId id() const { return id_; }
    std::size_t n_features_in() const { return n_features_in_; }
    double fit_time_seconds() const { return fit_time_seconds_; }
    bool supports_proba() const { return model_supports_proba(id_); }

    /// 0/1 labels; for probabilistic models label = 1 iff score >= 0.5.
    std::vector<int> predict(const Matrix& x) const;
    /// Positive-class scores in [0,1]; NoProbability for ridge/svm.
    std::vector<double> scores(const Matrix& x) const;

    /// |coefficient| x feature standard deviation for linear models,
    /// normalized impurity decrease for tree models, nullopt otherwise.
    virtual std::optional<std::vector<double>> feature_importances() const { return std::nullopt; }

    void save(serialize::Writer& w) const;

protected:
    FittedModel(ModelId id, std::size_t n_features_in)
        : id_(id), n_features_in_(n_features_in) {}

    virtual std::vector<int> do_predict(const Matrix& x) const = 0;
    virtual std::vector<double> do_scores(const Matrix& x) const;
    virtual void save_payload(serialize::FieldMap& f) const = 0;

private:
    friend std::shared_ptr<const FittedModel> fit_model(const Estimator&, const Matrix&,
                                                        const std::vector<int>&, std::uint64_t);
    ModelId id_;
    std::size_t n_features_in_;
    double fit_time_seconds_ = 0.0;
};

using FittedModelPtr = std::shared_ptr<const FittedModel>;

/// Deterministic in (x, y, params, seed). Single-class y -> DegenerateTarget
/// (dummy exempt: it fits and predicts the lone class).
FittedModelPtr fit_model(const Estimator& e, const Matrix& x, const std::vector<int>& y,
                         std::uint64_t seed);

FittedModelPtr load_fitted_model(serialize::Reader& r);

/// L2-regularized logistic loss and its analytic gradient at (w..., b):
/// sum_i [log(1+exp(m_i)) - y_i m_i] + l2/2 * ||w||^2, m = x.w + b.
/// The solver uses exactly these; the gradient check tests them against
/// central finite differences.
double logistic_loss(std::span<const double> wb, const Matrix& x, const std::vector<int>& y,
                     double l2);
std::vector<double> logistic_loss_gradient(std::span<const double> wb, const Matrix& x,
                                           const std::vector<int>& y, double l2);

/// Small documented hyperparameter grid per model, the tuner's search space.
/// Grids list overrides only; an empty map means documented defaults.
std::vector<ParamMap> tuning_grid(ModelId id);

}  // namespace autoflow
