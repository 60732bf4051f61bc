#include <algorithm>
#include <cmath>
#include <numeric>

#include "autoflow/error.hpp"
#include "autoflow/rng.hpp"
#include "models_internal.hpp"
#include "tree_internal.hpp"

namespace autoflow::detail {

namespace {

double sigmoid(double m) {
    if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
    const double e = std::exp(m);
    return e / (1.0 + e);
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

class DtModel final : public FittedModel {
public:
    DtModel(Tree tree, std::vector<double> importances, std::size_t d)
        : FittedModel(ModelId::dt, d), tree_(std::move(tree)),
          importances_(std::move(importances)) {}

    std::optional<std::vector<double>> feature_importances() const override { return importances_; }

    void save_payload(serialize::FieldMap& f) const override {
        save_trees(f, {tree_});
        f.set_f64s("importances", importances_);
    }

protected:
    std::vector<int> do_predict(const Matrix& x) const override {
        std::vector<int> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = tree_.predict_row(x, r) >= 0.5 ? 1 : 0;
        return out;
    }

    std::vector<double> do_scores(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = tree_.predict_row(x, r);
        return out;
    }

private:
    Tree tree_;
    std::vector<double> importances_;
};

/// Bagged (rf) or fully random (et) trees; the ensemble votes, and the score
/// is the fraction of trees voting positive.
class ForestModel final : public FittedModel {
public:
    ForestModel(ModelId id, std::vector<Tree> trees, std::vector<double> importances,
                std::size_t d)
        : FittedModel(id, d), trees_(std::move(trees)), importances_(std::move(importances)) {}

    std::optional<std::vector<double>> feature_importances() const override { return importances_; }

    void save_payload(serialize::FieldMap& f) const override {
        save_trees(f, trees_);
        f.set_f64s("importances", importances_);
    }

protected:
    std::vector<int> do_predict(const Matrix& x) const override {
        std::vector<int> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r)
            out[r] = 2 * votes(x, r) >= trees_.size() ? 1 : 0;
        return out;
    }

    std::vector<double> do_scores(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r)
            out[r] = static_cast<double>(votes(x, r)) / static_cast<double>(trees_.size());
        return out;
    }

private:
    std::size_t votes(const Matrix& x, std::size_t r) const {
        std::size_t v = 0;
        for (const Tree& t : trees_)
            if (t.predict_row(x, r) >= 0.5) ++v;
        return v;
    }

    std::vector<Tree> trees_;
    std::vector<double> importances_;
};

/// Gradient boosting on the logistic loss: shallow regression trees on the
/// residual, one Newton step per leaf, shrunk by the learning rate.
class GbcModel final : public FittedModel {
public:
    GbcModel(double f0, double learning_rate, std::vector<Tree> trees,
             std::vector<double> importances, std::size_t d)
        : FittedModel(ModelId::gbc, d), f0_(f0), learning_rate_(learning_rate),
          trees_(std::move(trees)), importances_(std::move(importances)) {}

    std::optional<std::vector<double>> feature_importances() const override { return importances_; }

    void save_payload(serialize::FieldMap& f) const override {
        save_trees(f, trees_);
        f.set_f64("f0", f0_);
        f.set_f64("learning_rate", learning_rate_);
        f.set_f64s("importances", importances_);
    }

protected:
    std::vector<int> do_predict(const Matrix& x) const override {
        std::vector<int> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = decision(x, r) >= 0.0 ? 1 : 0;
        return out;
    }

    std::vector<double> do_scores(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(decision(x, r));
        return out;
    }

private:
    double decision(const Matrix& x, std::size_t r) const {
        double f = f0_;
        for (const Tree& t : trees_) f += learning_rate_ * t.predict_row(x, r);
        return f;
    }

    double f0_;
    double learning_rate_;
    std::vector<Tree> trees_;
    std::vector<double> importances_;
};

/// SAMME with depth-1 stumps; the decision is the alpha-weighted vote
/// normalized to [-1, 1].
class AdaModel final : public FittedModel {
public:
    AdaModel(std::vector<Tree> stumps, std::vector<double> alphas,
             std::vector<double> importances, std::size_t d)
        : FittedModel(ModelId::ada, d), stumps_(std::move(stumps)), alphas_(std::move(alphas)),
          importances_(std::move(importances)) {}

    std::optional<std::vector<double>> feature_importances() const override { return importances_; }

    void save_payload(serialize::FieldMap& f) const override {
        save_trees(f, stumps_);
        f.set_f64s("alphas", alphas_);
        f.set_f64s("importances", importances_);
    }

protected:
    std::vector<int> do_predict(const Matrix& x) const override {
        std::vector<int> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = decision(x, r) >= 0.0 ? 1 : 0;
        return out;
    }

    std::vector<double> do_scores(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = 0.5 * (decision(x, r) + 1.0);
        return out;
    }

private:
    double decision(const Matrix& x, std::size_t r) const {
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t < stumps_.size(); ++t) {
            const double vote = stumps_[t].predict_row(x, r) >= 0.5 ? 1.0 : -1.0;
            num += alphas_[t] * vote;
            den += alphas_[t];
        }
        return den > 0.0 ? num / den : 0.0;
    }

    std::vector<Tree> stumps_;
    std::vector<double> alphas_;
    std::vector<double> importances_;
};

}  // namespace

ModelPtr fit_dt(const ParamMap& p, const Matrix& x, const std::vector<int>& y) {
    TreeOptions opt;
    opt.max_depth = static_cast<std::size_t>(param(p, "max_depth"));
    opt.min_samples_split = static_cast<std::size_t>(param(p, "min_samples_split"));
    std::vector<double> imp(x.cols(), 0.0);
    Tree tree = build_classification_tree(x, y, all_rows(x.rows()), {}, opt, nullptr, &imp);
    return std::make_shared<DtModel>(std::move(tree), normalize_importances(std::move(imp)),
                                     x.cols());
}

namespace {

ModelPtr fit_forest(ModelId id, const ParamMap& p, const Matrix& x, const std::vector<int>& y,
                    std::uint64_t seed) {
    const auto n_trees = static_cast<std::size_t>(param(p, "n_trees"));
    if (n_trees < 1) fail(ErrorCode::BadConfig, "forest needs at least one tree");
    TreeOptions opt;
    opt.max_depth = static_cast<std::size_t>(param(p, "max_depth"));
    opt.min_samples_split = static_cast<std::size_t>(param(p, "min_samples_split"));
    opt.feature_subsample = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
    opt.random_thresholds = id == ModelId::et;

    const std::size_t n = x.rows();
    std::vector<Tree> trees;
    trees.reserve(n_trees);
    std::vector<double> imp(x.cols(), 0.0);
    std::vector<std::size_t> rows = all_rows(n);
    for (std::size_t t = 0; t < n_trees; ++t) {
        SplitMix64 rng(derive_seed(seed, t));
        if (id == ModelId::rf) {  // bootstrap resample per tree
            for (std::size_t i = 0; i < n; ++i)
                rows[i] = static_cast<std::size_t>(rng.next_below(n));
        }
        trees.push_back(build_classification_tree(x, y, rows, {}, opt, &rng, &imp));
    }
    return std::make_shared<ForestModel>(id, std::move(trees),
                                         normalize_importances(std::move(imp)), x.cols());
}

}  // namespace

ModelPtr fit_rf(const ParamMap& p, const Matrix& x, const std::vector<int>& y, std::uint64_t seed) {
    return fit_forest(ModelId::rf, p, x, y, seed);
}

ModelPtr fit_et(const ParamMap& p, const Matrix& x, const std::vector<int>& y, std::uint64_t seed) {
    return fit_forest(ModelId::et, p, x, y, seed);
}

ModelPtr fit_gbc(const ParamMap& p, const Matrix& x, const std::vector<int>& y) {
    const auto n_trees = static_cast<std::size_t>(param(p, "n_trees"));
    const double learning_rate = param(p, "learning_rate");
    TreeOptions opt;
    opt.max_depth = static_cast<std::size_t>(param(p, "max_depth"));
    opt.min_samples_split = 2;

    const std::size_t n = x.rows();
    double pos = 0.0;
    for (int v : y) pos += v;
    const double prior = pos / static_cast<double>(n);
    const double f0 = std::log(prior / (1.0 - prior));

    std::vector<double> f(n, f0), g(n), h(n);
    std::vector<Tree> trees;
    trees.reserve(n_trees);
    std::vector<double> imp(x.cols(), 0.0);
    const std::vector<std::size_t> rows = all_rows(n);
    for (std::size_t t = 0; t < n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double pi = sigmoid(f[i]);
            g[i] = static_cast<double>(y[i]) - pi;
            h[i] = std::max(pi * (1.0 - pi), 1e-12);
        }
        Tree tree = build_regression_tree(x, g, h, rows, opt, &imp);
        for (std::size_t i = 0; i < n; ++i) f[i] += learning_rate * tree.predict_row(x, i);
        trees.push_back(std::move(tree));
    }
    return std::make_shared<GbcModel>(f0, learning_rate, std::move(trees),
                                      normalize_importances(std::move(imp)), x.cols());
}

ModelPtr fit_ada(const ParamMap& p, const Matrix& x, const std::vector<int>& y) {
    const auto n_stumps = static_cast<std::size_t>(param(p, "n_stumps"));
    const std::size_t n = x.rows();
    TreeOptions opt;
    opt.max_depth = 1;
    opt.min_samples_split = 2;

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<Tree> stumps;
    std::vector<double> alphas;
    std::vector<double> imp(x.cols(), 0.0);
    const std::vector<std::size_t> rows = all_rows(n);

    for (std::size_t t = 0; t < n_stumps; ++t) {
        std::vector<double> stump_imp(x.cols(), 0.0);
        Tree stump = build_classification_tree(x, y, rows, w, opt, nullptr, &stump_imp);

        double err = 0.0;
        std::vector<int> pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = stump.predict_row(x, i) >= 0.5 ? 1 : 0;
            if (pred[i] != y[i]) err += w[i];
        }

        if (err >= 0.5 - 1e-12) {
            if (stumps.empty()) {  // keep the best stump alone rather than nothing
                stumps.push_back(std::move(stump));
                alphas.push_back(1e-3);
                for (std::size_t j = 0; j < x.cols(); ++j) imp[j] += 1e-3 * stump_imp[j];
            }
            break;
        }

        const double clamped = std::max(err, 1e-12);
        const double alpha = std::log((1.0 - clamped) / clamped);
        for (std::size_t j = 0; j < x.cols(); ++j) imp[j] += alpha * stump_imp[j];
        stumps.push_back(std::move(stump));
        alphas.push_back(alpha);

        if (err <= 1e-12) break;  // perfect stump, weights would collapse

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pred[i] != y[i]) w[i] *= std::exp(alpha);
            total += w[i];
        }
        for (auto& wi : w) wi /= total;
    }
    return std::make_shared<AdaModel>(std::move(stumps), std::move(alphas),
                                      normalize_importances(std::move(imp)), x.cols());
}

ModelPtr load_tree(ModelId, const serialize::FieldMap& f) {
    std::vector<Tree> trees = load_trees(f);
    if (trees.size() != 1) fail(ErrorCode::NotAModelFile, "expected a single tree");
    return std::make_shared<DtModel>(std::move(trees[0]), f.f64s("importances"),
                                     f.u64("n_features"));
}

ModelPtr load_ensemble(ModelId id, const serialize::FieldMap& f) {
    const std::size_t d = f.u64("n_features");
    std::vector<Tree> trees = load_trees(f);
    if (trees.empty()) fail(ErrorCode::NotAModelFile, "ensemble payload has no trees");
    if (id == ModelId::gbc)
        return std::make_shared<GbcModel>(f.f64("f0"), f.f64("learning_rate"), std::move(trees),
                                          f.f64s("importances"), d);
    if (id == ModelId::ada) {
        auto alphas = f.f64s("alphas");
        if (alphas.size() != trees.size()) fail(ErrorCode::NotAModelFile, "bad ada payload");
        return std::make_shared<AdaModel>(std::move(trees), std::move(alphas),
                                          f.f64s("importances"), d);
    }
    return std::make_shared<ForestModel>(id, std::move(trees), f.f64s("importances"), d);
}

}  // namespace autoflow::detail
