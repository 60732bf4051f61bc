#include <chrono>
#include <cmath>

#include "autoflow/error.hpp"
#include "models_internal.hpp"

namespace autoflow {

namespace {

struct ModelMeta {
    ModelId id;
    const char* key;
    const char* display;
    bool proba;
};

constexpr ModelMeta kMeta[] = {
    {ModelId::lr, "lr", "Logistic Regression", true},
    {ModelId::ridge, "ridge", "Ridge Classifier", false},
    {ModelId::lda, "lda", "Linear Discriminant Analysis", true},
    {ModelId::qda, "qda", "Quadratic Discriminant Analysis", true},
    {ModelId::nb, "nb", "Naive Bayes", true},
    {ModelId::knn, "knn", "K Neighbors Classifier", true},
    {ModelId::dt, "dt", "Decision Tree Classifier", true},
    {ModelId::rf, "rf", "Random Forest Classifier", true},
    {ModelId::et, "et", "Extra Trees Classifier", true},
    {ModelId::gbc, "gbc", "Gradient Boosting Classifier", true},
    {ModelId::ada, "ada", "Ada Boost Classifier", true},
    {ModelId::svm, "svm", "SVM - Linear Kernel", false},
    {ModelId::dummy, "dummy", "Dummy Classifier", true},
};

const ModelMeta& meta(ModelId id) {
    for (const auto& m : kMeta)
        if (m.id == id) return m;
    fail(ErrorCode::UnknownModel, "invalid model id");
}

ParamMap model_defaults(ModelId id) {
    switch (id) {
        case ModelId::lr: return {{"C", 1.0}, {"max_iter", 100}, {"tol", 1e-8}};
        case ModelId::ridge: return {{"alpha", 1.0}};
        case ModelId::lda: return {};
        case ModelId::qda: return {{"reg", 1e-9}};
        case ModelId::nb: return {{"var_smoothing", 1e-9}};
        case ModelId::knn: return {{"k", 5}};
        case ModelId::dt: return {{"max_depth", 0}, {"min_samples_split", 2}};
        case ModelId::rf:
        case ModelId::et: return {{"n_trees", 100}, {"max_depth", 0}, {"min_samples_split", 2}};
        case ModelId::gbc: return {{"n_trees", 100}, {"max_depth", 3}, {"learning_rate", 0.1}};
        case ModelId::ada: return {{"n_stumps", 50}};
        case ModelId::svm: return {{"lambda", 1e-4}, {"epochs", 20}};
        case ModelId::dummy: return {};
    }
    return {};
}

}  // namespace

std::string_view model_id_string(ModelId id) { return meta(id).key; }

std::optional<ModelId> parse_model_id(std::string_view s) {
    for (const auto& m : kMeta)
        if (s == m.key) return m.id;
    return std::nullopt;
}

std::string_view model_display_name(ModelId id) { return meta(id).display; }

bool model_supports_proba(ModelId id) { return meta(id).proba; }

Estimator create_estimator(ModelId id, const ParamMap& overrides) {
    Estimator e;
    e.id = id;
    e.params = model_defaults(id);
    for (const auto& [name, value] : overrides) {
        auto it = e.params.find(name);
        if (it == e.params.end())
            fail(ErrorCode::UnknownParam,
                 "model '" + std::string(meta(id).key) + "' has no hyperparameter '" + name + "'");
        it->second = value;
    }
    e.supports_proba = meta(id).proba;
    return e;
}

Estimator create_estimator(std::string_view id, const ParamMap& overrides) {
    const auto parsed = parse_model_id(id);
    if (!parsed) {
        std::string known;
        for (const auto& m : kMeta) {
            if (!known.empty()) known += ", ";
            known += m.key;
        }
        fail(ErrorCode::UnknownModel, "unknown model '" + std::string(id) + "' (known: " + known + ")");
    }
    return create_estimator(*parsed, overrides);
}

std::vector<int> FittedModel::predict(const Matrix& x) const {
    if (x.cols() != n_features_in_)
        fail(ErrorCode::SchemaMismatch,
             "expected " + std::to_string(n_features_in_) + " features, got " +
                 std::to_string(x.cols()));
    return do_predict(x);
}

std::vector<double> FittedModel::scores(const Matrix& x) const {
    if (!supports_proba())
        fail(ErrorCode::NoProbability,
             std::string(model_display_name(id_)) + " does not produce probabilities");
    if (x.cols() != n_features_in_)
        fail(ErrorCode::SchemaMismatch,
             "expected " + std::to_string(n_features_in_) + " features, got " +
                 std::to_string(x.cols()));
    return do_scores(x);
}

std::vector<double> FittedModel::do_scores(const Matrix&) const {
    fail(ErrorCode::NoProbability, "model does not produce probabilities");
}

void FittedModel::save(serialize::Writer& w) const {
    serialize::FieldMap f;
    f.set_str("model", std::string(model_id_string(id_)));
    f.set_u64("n_features", n_features_in_);
    save_payload(f);
    f.write(w);
}

FittedModelPtr fit_model(const Estimator& e, const Matrix& x, const std::vector<int>& y,
                         std::uint64_t seed) {
    if (x.rows() == 0) fail(ErrorCode::EmptyInput, "cannot fit on zero rows");
    if (x.rows() != y.size()) fail(ErrorCode::SchemaMismatch, "rows and labels differ in length");
    bool has0 = false, has1 = false;
    for (int v : y) {
        if (v == 0) has0 = true;
        else if (v == 1) has1 = true;
        else fail(ErrorCode::NotBinary, "labels must be 0/1");
    }
    if (!(has0 && has1) && e.id != ModelId::dummy)
        fail(ErrorCode::DegenerateTarget, "training labels contain a single class");

    // defaults for any key the caller did not set (fit paths read by name)
    ParamMap p = model_defaults(e.id);
    for (const auto& [k, v] : e.params) p[k] = v;

    const auto t0 = std::chrono::steady_clock::now();
    detail::ModelPtr m;
    switch (e.id) {
        case ModelId::lr: m = detail::fit_lr(p, x, y); break;
        case ModelId::ridge: m = detail::fit_ridge(p, x, y); break;
        case ModelId::svm: m = detail::fit_svm(p, x, y, seed); break;
        case ModelId::lda: m = detail::fit_lda(p, x, y); break;
        case ModelId::qda: m = detail::fit_qda(p, x, y); break;
        case ModelId::nb: m = detail::fit_nb(p, x, y); break;
        case ModelId::knn: m = detail::fit_knn(p, x, y); break;
        case ModelId::dummy: m = detail::fit_dummy(p, x, y); break;
        case ModelId::dt: m = detail::fit_dt(p, x, y); break;
        case ModelId::rf: m = detail::fit_rf(p, x, y, seed); break;
        case ModelId::et: m = detail::fit_et(p, x, y, seed); break;
        case ModelId::gbc: m = detail::fit_gbc(p, x, y); break;
        case ModelId::ada: m = detail::fit_ada(p, x, y); break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    m->fit_time_seconds_ = std::chrono::duration<double>(t1 - t0).count();
    return m;
}

FittedModelPtr load_fitted_model(serialize::Reader& r) {
    const serialize::FieldMap f = serialize::FieldMap::read(r);
    const auto id = parse_model_id(f.str("model"));
    if (!id) fail(ErrorCode::NotAModelFile, "unknown model kind '" + f.str("model") + "'");
    switch (*id) {
        case ModelId::lr:
        case ModelId::ridge:
        case ModelId::svm:
        case ModelId::lda: return detail::load_linear(*id, f);  // lda reduces to a linear rule
        case ModelId::qda:
        case ModelId::nb: return detail::load_gaussian(*id, f);
        case ModelId::knn:
        case ModelId::dummy: return detail::load_instance(*id, f);
        case ModelId::dt: return detail::load_tree(*id, f);
        case ModelId::rf:
        case ModelId::et:
        case ModelId::gbc:
        case ModelId::ada: return detail::load_ensemble(*id, f);
    }
    fail(ErrorCode::NotAModelFile, "unknown model kind");
}

std::vector<ParamMap> tuning_grid(ModelId id) {
    std::vector<ParamMap> grid;
    switch (id) {
        case ModelId::lr:
            for (double c : {0.01, 0.1, 1.0, 10.0}) grid.push_back({{"C", c}});
            break;
        case ModelId::ridge:
            for (double a : {0.1, 1.0, 10.0}) grid.push_back({{"alpha", a}});
            break;
        case ModelId::lda:
            grid.push_back({});
            break;
        case ModelId::qda:
            for (double r : {1e-9, 1e-6, 1e-3}) grid.push_back({{"reg", r}});
            break;
        case ModelId::nb:
            for (double v : {1e-9, 1e-8, 1e-7}) grid.push_back({{"var_smoothing", v}});
            break;
        case ModelId::knn:
            for (double k : {3.0, 5.0, 7.0, 9.0, 11.0}) grid.push_back({{"k", k}});
            break;
        case ModelId::dt:
            for (double d : {2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) grid.push_back({{"max_depth", d}});
            break;
        case ModelId::rf:
        case ModelId::et:
            for (double t : {50.0, 100.0, 200.0}) grid.push_back({{"n_trees", t}});
            break;
        case ModelId::gbc:
            for (double lr : {0.05, 0.1, 0.2})
                for (double d : {2.0, 3.0}) grid.push_back({{"learning_rate", lr}, {"max_depth", d}});
            break;
        case ModelId::ada:
            for (double s : {25.0, 50.0, 100.0}) grid.push_back({{"n_stumps", s}});
            break;
        case ModelId::svm:
            for (double l : {1e-5, 1e-4, 1e-3}) grid.push_back({{"lambda", l}});
            break;
        case ModelId::dummy:
            grid.push_back({});
            break;
    }
    return grid;
}

namespace detail {

double param(const ParamMap& p, const char* name) {
    auto it = p.find(name);
    if (it == p.end()) fail(ErrorCode::UnknownParam, std::string("missing parameter ") + name);
    return it->second;
}

std::vector<double> column_stds(const Matrix& x) {
    const std::size_t n = x.rows(), d = x.cols();
    std::vector<double> mean(d, 0.0), out(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < d; ++j) mean[j] += x.at(r, j);
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = x.at(r, j) - mean[j];
            out[j] += dv * dv;
        }
    for (auto& s : out) s = std::sqrt(s / static_cast<double>(n));
    return out;
}

}  // namespace detail

}  // namespace autoflow
