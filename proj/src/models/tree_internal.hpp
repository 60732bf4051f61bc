#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "autoflow/matrix.hpp"
#include "autoflow/rng.hpp"
#include "autoflow/serialize.hpp"

namespace autoflow::detail {

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left iff x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  // leaf payload: positive fraction or regression response
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict_row(const Matrix& x, std::size_t r) const {
        std::int32_t i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const TreeNode& n = nodes[static_cast<std::size_t>(i)];
            i = x.at(r, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }
};

struct TreeOptions {
    std::size_t max_depth = 0;          // 0 = grow to purity
    std::size_t min_samples_split = 2;
    std::size_t feature_subsample = 0;  // 0 = consider every feature
    bool random_thresholds = false;     // extra-trees style candidate splits
};

/// CART with Gini impurity and optional sample weights. Ties in gain resolve
/// to the lowest feature index, then the lowest threshold. Leaf value is the
/// weighted positive fraction. importance_accum (length d), when given,
/// collects weighted impurity decrease per feature.
Tree build_classification_tree(const Matrix& x, const std::vector<int>& y,
                               std::span<const std::size_t> rows,
                               std::span<const double> weights, const TreeOptions& opt,
                               SplitMix64* rng, std::vector<double>* importance_accum);

/// Squared-error regression tree on targets g. When hessian h is non-empty,
/// leaf value = sum(g)/sum(h) (one Newton step); otherwise the leaf mean.
Tree build_regression_tree(const Matrix& x, const std::vector<double>& g,
                           const std::vector<double>& h, std::span<const std::size_t> rows,
                           const TreeOptions& opt, std::vector<double>* importance_accum);

void save_trees(serialize::FieldMap& f, const std::vector<Tree>& trees);
std::vector<Tree> load_trees(const serialize::FieldMap& f);

/// Accumulated importances scaled to sum 1 (all-zero when no split exists).
std::vector<double> normalize_importances(std::vector<double> raw);

}  // namespace autoflow::detail
