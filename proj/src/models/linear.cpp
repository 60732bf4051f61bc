#include <algorithm>
#include <cmath>

#include "autoflow/error.hpp"
#include "autoflow/linalg.hpp"
#include "autoflow/rng.hpp"
#include "models_internal.hpp"

namespace autoflow {

namespace {

double sigmoid(double m) {
    if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
    const double e = std::exp(m);
    return e / (1.0 + e);
}

double softplus(double m) {  // log(1 + e^m), stable
    return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

double margin(std::span<const double> wb, const Matrix& x, std::size_t r) {
    const std::size_t d = x.cols();
    double m = wb[d];
    for (std::size_t j = 0; j < d; ++j) m += wb[j] * x.at(r, j);
    return m;
}

}  // namespace

double logistic_loss(std::span<const double> wb, const Matrix& x, const std::vector<int>& y,
                     double l2) {
    const std::size_t d = x.cols();
    double loss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double m = margin(wb, x, r);
        loss += softplus(m) - (y[r] ? m : 0.0);
    }
    for (std::size_t j = 0; j < d; ++j) loss += 0.5 * l2 * wb[j] * wb[j];
    return loss;
}

std::vector<double> logistic_loss_gradient(std::span<const double> wb, const Matrix& x,
                                           const std::vector<int>& y, double l2) {
    const std::size_t d = x.cols();
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double resid = sigmoid(margin(wb, x, r)) - (y[r] ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) g[j] += resid * x.at(r, j);
        g[d] += resid;
    }
    for (std::size_t j = 0; j < d; ++j) g[j] += l2 * wb[j];
    return g;
}

namespace detail {

namespace {

class LinearModel final : public FittedModel {
public:
    LinearModel(ModelId id, std::vector<double> w, double b, std::vector<double> stds)
        : FittedModel(id, w.size()), w_(std::move(w)), b_(b), stds_(std::move(stds)) {}

    std::optional<std::vector<double>> feature_importances() const override {
        std::vector<double> imp(w_.size());
        for (std::size_t j = 0; j < w_.size(); ++j) imp[j] = std::abs(w_[j]) * stds_[j];
        return imp;
    }

    void save_payload(serialize::FieldMap& f) const override {
        f.set_f64s("w", w_);
        f.set_f64("b", b_);
        f.set_f64s("stds", stds_);
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
        double m = b_;
        for (std::size_t j = 0; j < w_.size(); ++j) m += w_[j] * x.at(r, j);
        return m;
    }

    std::vector<double> w_;
    double b_;
    std::vector<double> stds_;
};

// Newton direction with jittered Cholesky; the Hessian of the logistic loss
// can be near-singular once the classes separate.
std::vector<double> newton_direction(const std::vector<double>& h, std::vector<double> g,
                                     std::size_t n) {
    double jitter = 0.0;
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += h[i * n + i];
    for (int attempt = 0; attempt < 12; ++attempt) {
        std::vector<double> a = h;
        if (jitter > 0.0)
            for (std::size_t i = 0; i < n; ++i) a[i * n + i] += jitter;
        linalg::Cholesky ch(a, n);
        if (ch.ok()) return ch.solve(g);
        jitter = jitter == 0.0 ? 1e-10 * (1.0 + trace / static_cast<double>(n)) : jitter * 10.0;
    }
    // fall back to a (scaled) gradient step
    for (auto& v : g) v /= (1.0 + trace);
    return g;
}

}  // namespace

ModelPtr fit_lr(const ParamMap& p, const Matrix& x, const std::vector<int>& y) {
    const std::size_t d = x.cols();
    const double l2 = 1.0 / param(p, "C");  // inverse-strength convention
    const double tol = param(p, "tol");
    const int max_iter = static_cast<int>(param(p, "max_iter"));

    std::vector<double> wb(d + 1, 0.0);
    double loss = logistic_loss(wb, x, y, l2);
    for (int iter = 0; iter < max_iter; ++iter) {
        const std::vector<double> g = logistic_loss_gradient(wb, x, y, l2);
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < tol) break;

        // Hessian: X^T diag(p(1-p)) X with the intercept column appended;
        // the L2 term touches the weight block only
        std::vector<double> h((d + 1) * (d + 1), 0.0);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double pr = sigmoid(margin(wb, x, r));
            const double wgt = pr * (1.0 - pr);
            for (std::size_t j = 0; j <= d; ++j) {
                const double xj = j < d ? x.at(r, j) : 1.0;
                for (std::size_t k = j; k <= d; ++k) {
                    const double xk = k < d ? x.at(r, k) : 1.0;
                    h[j * (d + 1) + k] += wgt * xj * xk;
                }
            }
        }
        for (std::size_t j = 0; j <= d; ++j)
            for (std::size_t k = 0; k < j; ++k) h[j * (d + 1) + k] = h[k * (d + 1) + j];
        for (std::size_t j = 0; j < d; ++j) h[j * (d + 1) + j] += l2;

        std::vector<double> step = newton_direction(h, g, d + 1);
        double gdotstep = 0.0;
        for (std::size_t j = 0; j <= d; ++j) gdotstep += g[j] * step[j];
        if (gdotstep <= 0.0) {  // not a descent direction; fall back to gradient
            step = g;
            gdotstep = 0.0;
            for (double v : g) gdotstep += v * v;
        }

        double t = 1.0;
        std::vector<double> trial(d + 1);
        double trial_loss = loss;
        bool accepted = false;
        for (int halving = 0; halving < 50; ++halving) {
            for (std::size_t j = 0; j <= d; ++j) trial[j] = wb[j] - t * step[j];
            trial_loss = logistic_loss(trial, x, y, l2);
            if (trial_loss <= loss - 1e-4 * t * gdotstep) {  // Armijo
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted || trial_loss >= loss) break;  // no descent left
        wb = trial;
        loss = trial_loss;
    }

    std::vector<double> w(wb.begin(), wb.begin() + static_cast<std::ptrdiff_t>(d));
    return std::make_shared<LinearModel>(ModelId::lr, std::move(w), wb[d], column_stds(x));
}

ModelPtr fit_ridge(const ParamMap& p, const Matrix& x, const std::vector<int>& y) {
    const std::size_t n = x.rows(), d = x.cols();
    const double alpha = param(p, "alpha");

    // ridge regression on +-1 targets, features and targets centered
    std::vector<double> xm(d, 0.0);
    double ym = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < d; ++j) xm[j] += x.at(r, j);
        ym += y[r] ? 1.0 : -1.0;
    }
    for (auto& m : xm) m /= static_cast<double>(n);
    ym /= static_cast<double>(n);

    std::vector<double> a(d * d, 0.0), rhs(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double zc = (y[r] ? 1.0 : -1.0) - ym;
        for (std::size_t j = 0; j < d; ++j) {
            const double xj = x.at(r, j) - xm[j];
            rhs[j] += xj * zc;
            for (std::size_t k = j; k < d; ++k) a[j * d + k] += xj * (x.at(r, k) - xm[k]);
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < j; ++k) a[j * d + k] = a[k * d + j];
        a[j * d + j] += alpha;
    }

    std::vector<double> w = newton_direction(a, rhs, d);
    double b = ym;
    for (std::size_t j = 0; j < d; ++j) b -= w[j] * xm[j];
    return std::make_shared<LinearModel>(ModelId::ridge, std::move(w), b, column_stds(x));
}

ModelPtr fit_svm(const ParamMap& p, const Matrix& x, const std::vector<int>& y, std::uint64_t seed) {
    const std::size_t n = x.rows(), d = x.cols();
    const double lambda = param(p, "lambda");
    const int epochs = static_cast<int>(param(p, "epochs"));

    // pegasos-style stochastic subgradient on the hinge loss; the bias is
    // updated unregularized
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    SplitMix64 rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::uint64_t t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double z = y[i] ? 1.0 : -1.0;
            double m = b;
            for (std::size_t j = 0; j < d; ++j) m += w[j] * x.at(i, j);
            const double scale = 1.0 - eta * lambda;
            for (auto& wj : w) wj *= scale;
            if (z * m < 1.0) {
                for (std::size_t j = 0; j < d; ++j) w[j] += eta * z * x.at(i, j);
                b += eta * z;
            }
        }
    }
    return std::make_shared<LinearModel>(ModelId::svm, std::move(w), b, column_stds(x));
}

ModelPtr make_linear_model(ModelId id, std::vector<double> w, double b,
                           std::vector<double> stds) {
    return std::make_shared<LinearModel>(id, std::move(w), b, std::move(stds));
}

ModelPtr load_linear(ModelId id, const serialize::FieldMap& f) {
    return std::make_shared<LinearModel>(id, f.f64s("w"), f.f64("b"), f.f64s("stds"));
}

}  // namespace detail

}  // namespace autoflow
