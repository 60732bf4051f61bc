#pragma once

#include <cstdint>
#include <vector>

#include "autoflow/pipeline.hpp"

namespace autoflow {

/// Replaces missing numeric cells with the per-column mean of the
/// non-missing training values. Categorical columns pass through.
TransformerPtr make_mean_imputer();

/// Replaces missing categorical cells with the per-column most frequent
/// training value; ties break lexicographically. Numeric columns pass through.
TransformerPtr make_mode_imputer();

/// Per-column z-score with training mean and population (1/n) standard
/// deviation; zero-variance columns transform to 0. Numeric-only input.
TransformerPtr make_standard_scaler();

/// Projects onto the top-k principal directions of the training covariance
/// (exact symmetric eigendecomposition). Component signs are fixed so the
/// largest-magnitude loading is positive.
TransformerPtr make_pca(std::size_t n_components);

/// Expands each categorical column into one indicator column per category
/// seen at fit; unseen categories (and missing cells) map to all zeros.
/// A numeric-only table passes through unchanged.
TransformerPtr make_one_hot();

FittedTransformerPtr load_fitted_transformer(std::string_view kind, const serialize::FieldMap& f);

struct SplitSpec {
    double train_size = 0.7;
    std::uint64_t seed = 0;
    bool stratify = true;
};

struct StratifiedSplit {
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> test_indices;   // ascending
};

/// Per-class train count = floor(train_size * class count); membership by
/// seeded shuffle within each class, deterministic in the seed.
StratifiedSplit stratified_split(const std::vector<int>& y, const SplitSpec& spec);

class FoldPlan {
public:
    FoldPlan(std::size_t k, std::vector<std::size_t> assignments);

    std::size_t k() const { return k_; }
    std::size_t n_rows() const { return assignments_.size(); }
    const std::vector<std::size_t>& assignments() const { return assignments_; }

    std::vector<std::size_t> fold_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;

private:
    std::size_t k_;
    std::vector<std::size_t> assignments_;
};

/// Stratified k-fold: within each class, members are dealt round-robin after
/// a seeded shuffle; the dealing pointer carries across classes, so overall
/// fold sizes also differ by at most one.
FoldPlan stratified_kfold(const std::vector<int>& y, std::size_t k, std::uint64_t seed);

}  // namespace autoflow
