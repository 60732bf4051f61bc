#include <cmath>

#include "autoflow/error.hpp"
#include "autoflow/linalg.hpp"
#include "models_internal.hpp"

namespace autoflow::detail {

namespace {

double sigmoid(double m) {
    if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
    const double e = std::exp(m);
    return e / (1.0 + e);
}

linalg::Cholesky jittered_cholesky(std::vector<double> a, std::size_t n) {
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a[i * n + i];
    double jitter = 0.0;
    for (int attempt = 0; attempt < 20; ++attempt) {
        std::vector<double> m = a;
        if (jitter > 0.0)
            for (std::size_t i = 0; i < n; ++i) m[i * n + i] += jitter;
        linalg::Cholesky ch(m, n);
        if (ch.ok()) return ch;
        jitter = jitter == 0.0 ? 1e-10 * (1.0 + trace / static_cast<double>(n)) : jitter * 10.0;
    }
    fail(ErrorCode::DegenerateTarget, "covariance matrix could not be factorized");
}

struct ClassStats {
    std::vector<double> mean;     // per class, flattened [class][feature]
    std::vector<std::size_t> count;
};

ClassStats class_means(const Matrix& x, const std::vector<int>& y) {
    const std::size_t d = x.cols();
    ClassStats s;
    s.mean.assign(2 * d, 0.0);
    s.count.assign(2, 0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const std::size_t c = static_cast<std::size_t>(y[r]);
        ++s.count[c];
        for (std::size_t j = 0; j < d; ++j) s.mean[c * d + j] += x.at(r, j);
    }
    for (std::size_t c = 0; c < 2; ++c)
        if (s.count[c])
            for (std::size_t j = 0; j < d; ++j) s.mean[c * d + j] /= static_cast<double>(s.count[c]);
    return s;
}

// ------------------------------------------------------------------ QDA

class QdaModel final : public FittedModel {
public:
    QdaModel(std::vector<double> means, std::vector<double> cov0, std::vector<double> cov1,
             double log_prior0, double log_prior1, std::size_t d)
        : FittedModel(ModelId::qda, d), means_(std::move(means)), cov0_(std::move(cov0)),
          cov1_(std::move(cov1)), log_prior_{log_prior0, log_prior1},
          chol0_(jittered_cholesky(cov0_, d)), chol1_(jittered_cholesky(cov1_, d)) {}

    void save_payload(serialize::FieldMap& f) const override {
        f.set_f64s("means", means_);
        f.set_f64s("cov0", cov0_);
        f.set_f64s("cov1", cov1_);
        f.set_f64s("log_priors", {log_prior_[0], log_prior_[1]});
    }

protected:
    std::vector<int> do_predict(const Matrix& x) const override {
        std::vector<int> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = delta(x, r) >= 0.0 ? 1 : 0;
        return out;
    }

    std::vector<double> do_scores(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(delta(x, r));
        return out;
    }

private:
    double log_density(const Matrix& x, std::size_t r, std::size_t c) const {
        const std::size_t d = n_features_in();
        std::vector<double> diff(d);
        for (std::size_t j = 0; j < d; ++j) diff[j] = x.at(r, j) - means_[c * d + j];
        const linalg::Cholesky& ch = c == 0 ? chol0_ : chol1_;
        const std::vector<double> solved = ch.solve(diff);
        double quad = 0.0;
        for (std::size_t j = 0; j < d; ++j) quad += diff[j] * solved[j];
        return log_prior_[c] - 0.5 * (ch.log_det() + quad);
    }

    double delta(const Matrix& x, std::size_t r) const {
        return log_density(x, r, 1) - log_density(x, r, 0);
    }

    std::vector<double> means_;  // [class][feature]
    std::vector<double> cov0_;
    std::vector<double> cov1_;
    double log_prior_[2];
    linalg::Cholesky chol0_;
    linalg::Cholesky chol1_;
};

// ------------------------------------------------------------ Naive Bayes

class NbModel final : public FittedModel {
public:
    NbModel(std::vector<double> means, std::vector<double> vars, double log_prior0,
            double log_prior1, std::size_t d)
        : FittedModel(ModelId::nb, d), means_(std::move(means)), vars_(std::move(vars)),
          log_prior_{log_prior0, log_prior1} {}

    void save_payload(serialize::FieldMap& f) const override {
        f.set_f64s("means", means_);
        f.set_f64s("vars", vars_);
        f.set_f64s("log_priors", {log_prior_[0], log_prior_[1]});
    }

protected:
    std::vector<int> do_predict(const Matrix& x) const override {
        std::vector<int> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = delta(x, r) >= 0.0 ? 1 : 0;
        return out;
    }

    std::vector<double> do_scores(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = sigmoid(delta(x, r));
        return out;
    }

private:
    double log_lik(const Matrix& x, std::size_t r, std::size_t c) const {
        const std::size_t d = n_features_in();
        double ll = log_prior_[c];
        for (std::size_t j = 0; j < d; ++j) {
            const double v = vars_[c * d + j];
            const double diff = x.at(r, j) - means_[c * d + j];
            ll += -0.5 * std::log(2.0 * M_PI * v) - diff * diff / (2.0 * v);
        }
        return ll;
    }

    double delta(const Matrix& x, std::size_t r) const {
        return log_lik(x, r, 1) - log_lik(x, r, 0);
    }

    std::vector<double> means_;  // [class][feature]
    std::vector<double> vars_;
    double log_prior_[2];
};

}  // namespace

ModelPtr fit_lda(const ParamMap&, const Matrix& x, const std::vector<int>& y) {
    const std::size_t n = x.rows(), d = x.cols();
    const ClassStats s = class_means(x, y);

    // pooled within-class covariance
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c = static_cast<std::size_t>(y[r]);
        for (std::size_t j = 0; j < d; ++j) {
            const double dj = x.at(r, j) - s.mean[c * d + j];
            for (std::size_t k = j; k < d; ++k)
                cov[j * d + k] += dj * (x.at(r, k) - s.mean[c * d + k]);
        }
    }
    const double denom = static_cast<double>(n > 2 ? n - 2 : 1);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j; k < d; ++k) {
            cov[j * d + k] /= denom;
            cov[k * d + j] = cov[j * d + k];
        }

    const linalg::Cholesky ch = jittered_cholesky(cov, d);
    std::vector<double> mu0(s.mean.begin(), s.mean.begin() + static_cast<std::ptrdiff_t>(d));
    std::vector<double> mu1(s.mean.begin() + static_cast<std::ptrdiff_t>(d), s.mean.end());
    const std::vector<double> beta0 = ch.solve(mu0);
    const std::vector<double> beta1 = ch.solve(mu1);

    // two-class discriminant collapses to one linear rule: w.x + b >= 0
    std::vector<double> w(d);
    for (std::size_t j = 0; j < d; ++j) w[j] = beta1[j] - beta0[j];
    double b = std::log(static_cast<double>(s.count[1]) / static_cast<double>(s.count[0]));
    for (std::size_t j = 0; j < d; ++j) b -= 0.5 * (mu1[j] * beta1[j] - mu0[j] * beta0[j]);

    return make_linear_model(ModelId::lda, std::move(w), b, column_stds(x));
}

ModelPtr fit_qda(const ParamMap& p, const Matrix& x, const std::vector<int>& y) {
    const std::size_t n = x.rows(), d = x.cols();
    const double reg = param(p, "reg");
    const ClassStats s = class_means(x, y);

    std::vector<std::vector<double>> cov(2, std::vector<double>(d * d, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c = static_cast<std::size_t>(y[r]);
        for (std::size_t j = 0; j < d; ++j) {
            const double dj = x.at(r, j) - s.mean[c * d + j];
            for (std::size_t k = j; k < d; ++k)
                cov[c][j * d + k] += dj * (x.at(r, k) - s.mean[c * d + k]);
        }
    }
    for (std::size_t c = 0; c < 2; ++c) {
        const double denom = static_cast<double>(s.count[c] > 1 ? s.count[c] - 1 : 1);
        double trace = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = j; k < d; ++k) {
                cov[c][j * d + k] /= denom;
                cov[c][k * d + j] = cov[c][j * d + k];
            }
        for (std::size_t j = 0; j < d; ++j) trace += cov[c][j * d + j];
        const double ridge = reg * (trace > 0.0 ? trace / static_cast<double>(d) : 1.0);
        for (std::size_t j = 0; j < d; ++j) cov[c][j * d + j] += ridge;
    }

    const double total = static_cast<double>(n);
    return std::make_shared<QdaModel>(s.mean, std::move(cov[0]), std::move(cov[1]),
                                      std::log(static_cast<double>(s.count[0]) / total),
                                      std::log(static_cast<double>(s.count[1]) / total), d);
}

ModelPtr fit_nb(const ParamMap& p, const Matrix& x, const std::vector<int>& y) {
    const std::size_t n = x.rows(), d = x.cols();
    const double smoothing = param(p, "var_smoothing");
    const ClassStats s = class_means(x, y);

    std::vector<double> vars(2 * d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c = static_cast<std::size_t>(y[r]);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x.at(r, j) - s.mean[c * d + j];
            vars[c * d + j] += diff * diff;
        }
    }
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < d; ++j)
            vars[c * d + j] /= static_cast<double>(s.count[c]);  // population convention

    // variance floor: smoothing times the largest overall feature variance
    std::vector<double> overall_mean(d, 0.0), overall_var(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < d; ++j) overall_mean[j] += x.at(r, j);
    for (auto& m : overall_mean) m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x.at(r, j) - overall_mean[j];
            overall_var[j] += diff * diff;
        }
    double max_var = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        max_var = std::max(max_var, overall_var[j] / static_cast<double>(n));
    const double eps = std::max(smoothing * max_var, 1e-300);
    for (auto& v : vars) v += eps;

    const double total = static_cast<double>(n);
    return std::make_shared<NbModel>(s.mean, std::move(vars),
                                     std::log(static_cast<double>(s.count[0]) / total),
                                     std::log(static_cast<double>(s.count[1]) / total), d);
}

ModelPtr load_gaussian(ModelId id, const serialize::FieldMap& f) {
    const auto& priors = f.f64s("log_priors");
    if (priors.size() != 2) fail(ErrorCode::NotAModelFile, "bad gaussian payload");
    const std::size_t d = f.u64("n_features");
    if (id == ModelId::qda)
        return std::make_shared<QdaModel>(f.f64s("means"), f.f64s("cov0"), f.f64s("cov1"),
                                          priors[0], priors[1], d);
    return std::make_shared<NbModel>(f.f64s("means"), f.f64s("vars"), priors[0], priors[1], d);
}

}  // namespace autoflow::detail
