#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "autoflow/models.hpp"

namespace autoflow::detail {

using ModelPtr = std::shared_ptr<FittedModel>;

ModelPtr fit_lr(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_ridge(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_svm(const ParamMap& p, const Matrix& x, const std::vector<int>& y, std::uint64_t seed);
ModelPtr fit_lda(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_qda(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_nb(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_knn(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_dummy(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_dt(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_rf(const ParamMap& p, const Matrix& x, const std::vector<int>& y, std::uint64_t seed);
ModelPtr fit_et(const ParamMap& p, const Matrix& x, const std::vector<int>& y, std::uint64_t seed);
ModelPtr fit_gbc(const ParamMap& p, const Matrix& x, const std::vector<int>& y);
ModelPtr fit_ada(const ParamMap& p, const Matrix& x, const std::vector<int>& y);

ModelPtr make_linear_model(ModelId id, std::vector<double> w, double b, std::vector<double> stds);

ModelPtr load_linear(ModelId id, const serialize::FieldMap& f);
ModelPtr load_gaussian(ModelId id, const serialize::FieldMap& f);
ModelPtr load_instance(ModelId id, const serialize::FieldMap& f);  // knn, dummy
ModelPtr load_tree(ModelId id, const serialize::FieldMap& f);      // dt
ModelPtr load_ensemble(ModelId id, const serialize::FieldMap& f);  // rf, et, gbc, ada

double param(const ParamMap& p, const char* name);

// column standard deviations (population) of the training matrix; linear
// models keep them so coefficient magnitudes are comparable across features
std::vector<double> column_stds(const Matrix& x);

}  // namespace autoflow::detail
