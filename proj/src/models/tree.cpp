#include "tree_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "autoflow/error.hpp"
#include "models_internal.hpp"

namespace autoflow::detail {

namespace {

constexpr double kMinGain = 1e-12;

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

// Candidate features for one node: all of them, or a without-replacement
// draw of opt.feature_subsample indices.
std::vector<std::size_t> candidate_features(std::size_t d, const TreeOptions& opt,
                                            SplitMix64* rng) {
    std::vector<std::size_t> feats(d);
    std::iota(feats.begin(), feats.end(), std::size_t{0});
    if (opt.feature_subsample == 0 || opt.feature_subsample >= d || rng == nullptr) return feats;
    for (std::size_t i = 0; i < opt.feature_subsample; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng->next_below(d - i));
        std::swap(feats[i], feats[j]);
    }
    feats.resize(opt.feature_subsample);
    std::sort(feats.begin(), feats.end());  // keep the feature-index tie-break meaningful
    return feats;
}

double gini(double pos_w, double total_w) {
    if (total_w <= 0.0) return 0.0;
    const double p = pos_w / total_w;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

class ClassificationBuilder {
public:
    ClassificationBuilder(const Matrix& x, const std::vector<int>& y,
                          std::span<const double> weights, const TreeOptions& opt, SplitMix64* rng,
                          std::vector<double>* importances)
        : x_(x), y_(y), weights_(weights), opt_(opt), rng_(rng), importances_(importances) {}

    Tree build(std::span<const std::size_t> rows) {
        root_weight_ = 0.0;
        for (std::size_t r : rows) root_weight_ += weight(r);
        tree_.nodes.clear();
        std::vector<std::size_t> work(rows.begin(), rows.end());
        grow(work, 0);
        return std::move(tree_);
    }

private:
    double weight(std::size_t r) const { return weights_.empty() ? 1.0 : weights_[r]; }

    std::int32_t grow(std::vector<std::size_t>& rows, std::size_t depth) {
        double total_w = 0.0, pos_w = 0.0;
        for (std::size_t r : rows) {
            total_w += weight(r);
            pos_w += y_[r] ? weight(r) : 0.0;
        }
        const double node_impurity = gini(pos_w, total_w);
        const double leaf_value = total_w > 0.0 ? pos_w / total_w : 0.0;

        const bool depth_stop = opt_.max_depth != 0 && depth >= opt_.max_depth;
        if (depth_stop || rows.size() < opt_.min_samples_split || node_impurity <= kMinGain)
            return make_leaf(leaf_value);

        const SplitChoice split = find_split(rows, node_impurity, total_w, pos_w);
        if (!split.found) return make_leaf(leaf_value);

        if (importances_)
            (*importances_)[split.feature] += (total_w / root_weight_) * split.gain;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) {
            if (x_.at(r, split.feature) <= split.threshold) left.push_back(r);
            else right.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const std::int32_t me = make_node(split);
        const std::int32_t l = grow(left, depth + 1);
        const std::int32_t r = grow(right, depth + 1);
        tree_.nodes[static_cast<std::size_t>(me)].left = l;
        tree_.nodes[static_cast<std::size_t>(me)].right = r;
        return me;
    }

    SplitChoice find_split(const std::vector<std::size_t>& rows, double node_impurity,
                           double total_w, double pos_w) {
        SplitChoice best;
        for (std::size_t j : candidate_features(x_.cols(), opt_, rng_)) {
            if (opt_.random_thresholds) consider_random(j, rows, node_impurity, total_w, pos_w, best);
            else consider_exact(j, rows, node_impurity, total_w, pos_w, best);
        }
        return best;
    }

    void consider_exact(std::size_t j, const std::vector<std::size_t>& rows, double node_impurity,
                        double total_w, double pos_w, SplitChoice& best) {
        scratch_.clear();
        for (std::size_t r : rows) scratch_.push_back({x_.at(r, j), weight(r), y_[r] ? weight(r) : 0.0});
        std::sort(scratch_.begin(), scratch_.end(),
                  [](const Sample& a, const Sample& b) { return a.value < b.value; });

        double wl = 0.0, pl = 0.0;
        for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
            wl += scratch_[i].w;
            pl += scratch_[i].pw;
            if (scratch_[i].value == scratch_[i + 1].value) continue;
            const double threshold = scratch_[i].value + 0.5 * (scratch_[i + 1].value - scratch_[i].value);
            const double wr = total_w - wl;
            const double child = (wl * gini(pl, wl) + wr * gini(pos_w - pl, wr)) / total_w;
            const double gain = node_impurity - child;
            // zero-gain splits are allowed on impure nodes; Gini plateaus
            // (XOR-like data) only separate one level deeper
            if (!best.found || gain > best.gain + kMinGain) {
                best = {true, j, threshold, gain};
            }
        }
    }

    void consider_random(std::size_t j, const std::vector<std::size_t>& rows, double node_impurity,
                         double total_w, double pos_w, SplitChoice& best) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r : rows) {
            lo = std::min(lo, x_.at(r, j));
            hi = std::max(hi, x_.at(r, j));
        }
        if (!(hi > lo)) return;
        const double threshold = lo + rng_->next_unit() * (hi - lo);
        double wl = 0.0, pl = 0.0;
        for (std::size_t r : rows) {
            if (x_.at(r, j) <= threshold) {
                wl += weight(r);
                pl += y_[r] ? weight(r) : 0.0;
            }
        }
        const double wr = total_w - wl;
        if (wl <= 0.0 || wr <= 0.0) return;
        const double child = (wl * gini(pl, wl) + wr * gini(pos_w - pl, wr)) / total_w;
        const double gain = node_impurity - child;
        if (!best.found || gain > best.gain + kMinGain) best = {true, j, threshold, gain};
    }

    std::int32_t make_leaf(double value) {
        TreeNode n;
        n.value = value;
        tree_.nodes.push_back(n);
        return static_cast<std::int32_t>(tree_.nodes.size() - 1);
    }

    std::int32_t make_node(const SplitChoice& s) {
        TreeNode n;
        n.feature = static_cast<std::int32_t>(s.feature);
        n.threshold = s.threshold;
        tree_.nodes.push_back(n);
        return static_cast<std::int32_t>(tree_.nodes.size() - 1);
    }

    struct Sample {
        double value;
        double w;
        double pw;
    };

    const Matrix& x_;
    const std::vector<int>& y_;
    std::span<const double> weights_;
    TreeOptions opt_;
    SplitMix64* rng_;
    std::vector<double>* importances_;
    Tree tree_;
    double root_weight_ = 0.0;
    std::vector<Sample> scratch_;
};

class RegressionBuilder {
public:
    RegressionBuilder(const Matrix& x, const std::vector<double>& g, const std::vector<double>& h,
                      const TreeOptions& opt, std::vector<double>* importances)
        : x_(x), g_(g), h_(h), opt_(opt), importances_(importances) {}

    Tree build(std::span<const std::size_t> rows) {
        root_count_ = static_cast<double>(rows.size());
        tree_.nodes.clear();
        std::vector<std::size_t> work(rows.begin(), rows.end());
        grow(work, 0);
        return std::move(tree_);
    }

private:
    std::int32_t grow(std::vector<std::size_t>& rows, std::size_t depth) {
        double sum = 0.0, sum_sq = 0.0, hess = 0.0;
        for (std::size_t r : rows) {
            sum += g_[r];
            sum_sq += g_[r] * g_[r];
            hess += h_.empty() ? 1.0 : h_[r];
        }
        const double n = static_cast<double>(rows.size());
        const double sse = sum_sq - sum * sum / n;
        const double leaf_value = sum / std::max(hess, 1e-12);

        const bool depth_stop = opt_.max_depth != 0 && depth >= opt_.max_depth;
        if (depth_stop || rows.size() < opt_.min_samples_split || sse <= kMinGain)
            return make_leaf(leaf_value);

        // maximize SSE decrease over exact thresholds
        SplitChoice best;
        for (std::size_t j = 0; j < x_.cols(); ++j) {
            scratch_.clear();
            for (std::size_t r : rows) scratch_.push_back({x_.at(r, j), g_[r]});
            std::sort(scratch_.begin(), scratch_.end(),
                      [](const Pair& a, const Pair& b) { return a.value < b.value; });
            double sl = 0.0;
            for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
                sl += scratch_[i].g;
                if (scratch_[i].value == scratch_[i + 1].value) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                const double sr = sum - sl;
                const double decrease = sl * sl / nl + sr * sr / nr - sum * sum / n;
                if (!best.found || decrease > best.gain + kMinGain) {
                    best = {true, j,
                            scratch_[i].value + 0.5 * (scratch_[i + 1].value - scratch_[i].value),
                            decrease};
                }
            }
        }
        if (!best.found) return make_leaf(leaf_value);

        if (importances_) (*importances_)[best.feature] += best.gain / root_count_;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) {
            if (x_.at(r, best.feature) <= best.threshold) left.push_back(r);
            else right.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        TreeNode node;
        node.feature = static_cast<std::int32_t>(best.feature);
        node.threshold = best.threshold;
        tree_.nodes.push_back(node);
        const auto me = static_cast<std::int32_t>(tree_.nodes.size() - 1);
        const std::int32_t l = grow(left, depth + 1);
        const std::int32_t r = grow(right, depth + 1);
        tree_.nodes[static_cast<std::size_t>(me)].left = l;
        tree_.nodes[static_cast<std::size_t>(me)].right = r;
        return me;
    }

    std::int32_t make_leaf(double value) {
        TreeNode n;
        n.value = value;
        tree_.nodes.push_back(n);
        return static_cast<std::int32_t>(tree_.nodes.size() - 1);
    }

    struct Pair {
        double value;
        double g;
    };

    const Matrix& x_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
    TreeOptions opt_;
    std::vector<double>* importances_;
    Tree tree_;
    double root_count_ = 0.0;
    std::vector<Pair> scratch_;
};

}  // namespace

Tree build_classification_tree(const Matrix& x, const std::vector<int>& y,
                               std::span<const std::size_t> rows,
                               std::span<const double> weights, const TreeOptions& opt,
                               SplitMix64* rng, std::vector<double>* importance_accum) {
    return ClassificationBuilder(x, y, weights, opt, rng, importance_accum).build(rows);
}

Tree build_regression_tree(const Matrix& x, const std::vector<double>& g,
                           const std::vector<double>& h, std::span<const std::size_t> rows,
                           const TreeOptions& opt, std::vector<double>* importance_accum) {
    return RegressionBuilder(x, g, h, opt, importance_accum).build(rows);
}

void save_trees(serialize::FieldMap& f, const std::vector<Tree>& trees) {
    std::vector<std::uint64_t> counts, features, lefts, rights;
    std::vector<double> thresholds, values;
    for (const Tree& t : trees) {
        counts.push_back(t.nodes.size());
        for (const TreeNode& n : t.nodes) {
            features.push_back(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.feature)));
            lefts.push_back(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.left)));
            rights.push_back(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.right)));
            thresholds.push_back(n.threshold);
            values.push_back(n.value);
        }
    }
    f.set_u64s("tree_counts", std::move(counts));
    f.set_u64s("node_features", std::move(features));
    f.set_u64s("node_lefts", std::move(lefts));
    f.set_u64s("node_rights", std::move(rights));
    f.set_f64s("node_thresholds", std::move(thresholds));
    f.set_f64s("node_values", std::move(values));
}

std::vector<Tree> load_trees(const serialize::FieldMap& f) {
    const auto& counts = f.u64s("tree_counts");
    const auto& features = f.u64s("node_features");
    const auto& lefts = f.u64s("node_lefts");
    const auto& rights = f.u64s("node_rights");
    const auto& thresholds = f.f64s("node_thresholds");
    const auto& values = f.f64s("node_values");
    const std::size_t total = features.size();
    if (lefts.size() != total || rights.size() != total || thresholds.size() != total ||
        values.size() != total)
        fail(ErrorCode::NotAModelFile, "inconsistent tree payload");

    std::vector<Tree> trees;
    std::size_t pos = 0;
    for (std::uint64_t c : counts) {
        if (pos + c > total) fail(ErrorCode::NotAModelFile, "inconsistent tree payload");
        Tree t;
        t.nodes.reserve(c);
        for (std::uint64_t i = 0; i < c; ++i, ++pos) {
            TreeNode n;
            n.feature = static_cast<std::int32_t>(static_cast<std::int64_t>(features[pos]));
            n.left = static_cast<std::int32_t>(static_cast<std::int64_t>(lefts[pos]));
            n.right = static_cast<std::int32_t>(static_cast<std::int64_t>(rights[pos]));
            n.threshold = thresholds[pos];
            n.value = values[pos];
            if (n.feature >= 0) {
                const auto nodes = static_cast<std::int64_t>(c);
                if (n.left < 0 || n.right < 0 || n.left >= nodes || n.right >= nodes)
                    fail(ErrorCode::NotAModelFile, "tree node index out of range");
            }
            t.nodes.push_back(n);
        }
        if (t.nodes.empty()) fail(ErrorCode::NotAModelFile, "empty tree in payload");
        trees.push_back(std::move(t));
    }
    return trees;
}

std::vector<double> normalize_importances(std::vector<double> raw) {
    double total = 0.0;
    for (double v : raw) total += v;
    if (total > 0.0)
        for (double& v : raw) v /= total;
    return raw;
}

}  // namespace autoflow::detail
