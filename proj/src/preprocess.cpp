#include "autoflow/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "autoflow/error.hpp"
#include "autoflow/linalg.hpp"
#include "autoflow/rng.hpp"

namespace autoflow {

namespace {

// ---------------------------------------------------------------- imputers

class FittedMeanImputer final : public FittedTransformer {
public:
    explicit FittedMeanImputer(std::vector<std::pair<std::string, double>> means)
        : means_(std::move(means)) {}

    std::string_view kind() const override { return "mean_impute"; }

    Table transform(const Table& in) const override {
        std::vector<Column> cols;
        cols.reserve(in.n_cols());
        for (std::size_t i = 0; i < in.n_cols(); ++i) {
            const Column& c = in.column(i);
            auto it = std::find_if(means_.begin(), means_.end(),
                                   [&](const auto& p) { return p.first == in.schema()[i].name; });
            if (c.kind() != ColumnKind::Numeric || it == means_.end() || !c.has_missing()) {
                cols.push_back(c);
                continue;
            }
            std::vector<double> values = c.numbers();
            for (std::size_t r = 0; r < values.size(); ++r)
                if (c.is_missing(r)) values[r] = it->second;
            cols.push_back(Column::numeric(std::move(values)));
        }
        return Table(in.schema(), std::move(cols));
    }

    void save(serialize::FieldMap& f) const override {
        std::vector<std::string> names;
        std::vector<double> values;
        for (const auto& [n, v] : means_) {
            names.push_back(n);
            values.push_back(v);
        }
        f.set_strs("columns", std::move(names));
        f.set_f64s("means", std::move(values));
    }

    static FittedTransformerPtr load(const serialize::FieldMap& f) {
        const auto& names = f.strs("columns");
        const auto& values = f.f64s("means");
        std::vector<std::pair<std::string, double>> means;
        for (std::size_t i = 0; i < names.size() && i < values.size(); ++i)
            means.emplace_back(names[i], values[i]);
        return std::make_shared<FittedMeanImputer>(std::move(means));
    }

private:
    std::vector<std::pair<std::string, double>> means_;
};

class MeanImputer final : public Transformer {
public:
    std::string_view kind() const override { return "mean_impute"; }

    FittedTransformerPtr fit(const Table& in) const override {
        std::vector<std::pair<std::string, double>> means;
        for (std::size_t i = 0; i < in.n_cols(); ++i) {
            const Column& c = in.column(i);
            if (c.kind() != ColumnKind::Numeric) continue;
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t r = 0; r < c.size(); ++r) {
                if (c.is_missing(r)) continue;
                sum += c.number(r);
                ++n;
            }
            if (n == 0)
                fail(ErrorCode::CannotImpute,
                     "numeric column '" + in.schema()[i].name + "' has no observed values");
            means.emplace_back(in.schema()[i].name, sum / static_cast<double>(n));
        }
        return std::make_shared<FittedMeanImputer>(std::move(means));
    }
};

class FittedModeImputer final : public FittedTransformer {
public:
    explicit FittedModeImputer(std::vector<std::pair<std::string, std::string>> modes)
        : modes_(std::move(modes)) {}

    std::string_view kind() const override { return "mode_impute"; }

    Table transform(const Table& in) const override {
        std::vector<Column> cols;
        cols.reserve(in.n_cols());
        for (std::size_t i = 0; i < in.n_cols(); ++i) {
            const Column& c = in.column(i);
            auto it = std::find_if(modes_.begin(), modes_.end(),
                                   [&](const auto& p) { return p.first == in.schema()[i].name; });
            if (c.kind() != ColumnKind::Categorical || it == modes_.end() || !c.has_missing()) {
                cols.push_back(c);
                continue;
            }
            std::vector<std::string> values = c.labels();
            for (std::size_t r = 0; r < values.size(); ++r)
                if (c.is_missing(r)) values[r] = it->second;
            cols.push_back(Column::categorical(std::move(values)));
        }
        return Table(in.schema(), std::move(cols));
    }

    void save(serialize::FieldMap& f) const override {
        std::vector<std::string> names;
        std::vector<std::string> values;
        for (const auto& [n, v] : modes_) {
            names.push_back(n);
            values.push_back(v);
        }
        f.set_strs("columns", std::move(names));
        f.set_strs("modes", std::move(values));
    }

    static FittedTransformerPtr load(const serialize::FieldMap& f) {
        const auto& names = f.strs("columns");
        const auto& values = f.strs("modes");
        std::vector<std::pair<std::string, std::string>> modes;
        for (std::size_t i = 0; i < names.size() && i < values.size(); ++i)
            modes.emplace_back(names[i], values[i]);
        return std::make_shared<FittedModeImputer>(std::move(modes));
    }

private:
    std::vector<std::pair<std::string, std::string>> modes_;
};

class ModeImputer final : public Transformer {
public:
    std::string_view kind() const override { return "mode_impute"; }

    FittedTransformerPtr fit(const Table& in) const override {
        std::vector<std::pair<std::string, std::string>> modes;
        for (std::size_t i = 0; i < in.n_cols(); ++i) {
            const Column& c = in.column(i);
            if (c.kind() != ColumnKind::Categorical) continue;
            std::map<std::string, std::size_t> counts;  // ordered: lexicographic tie-break
            for (std::size_t r = 0; r < c.size(); ++r)
                if (!c.is_missing(r)) ++counts[c.label(r)];
            if (counts.empty())
                fail(ErrorCode::CannotImpute,
                     "categorical column '" + in.schema()[i].name + "' has no observed values");
            auto best = counts.begin();
            for (auto it = counts.begin(); it != counts.end(); ++it)
                if (it->second > best->second) best = it;
            modes.emplace_back(in.schema()[i].name, best->first);
        }
        return std::make_shared<FittedModeImputer>(std::move(modes));
    }
};

// ------------------------------------------------------------------ scaler

class FittedScaler final : public FittedTransformer {
public:
    FittedScaler(std::vector<double> means, std::vector<double> stds)
        : means_(std::move(means)), stds_(std::move(stds)) {}

    std::string_view kind() const override { return "standard_scaler"; }

    Table transform(const Table& in) const override {
        if (in.n_cols() != means_.size())
            fail(ErrorCode::SchemaMismatch, "scaler was fit on a different column count");
        std::vector<Column> cols;
        cols.reserve(in.n_cols());
        for (std::size_t i = 0; i < in.n_cols(); ++i) {
            const Column& c = in.column(i);
            std::vector<double> values(c.size(), 0.0);
            for (std::size_t r = 0; r < c.size(); ++r) {
                if (c.is_missing(r)) continue;
                values[r] = stds_[i] == 0.0 ? 0.0 : (c.number(r) - means_[i]) / stds_[i];
            }
            cols.push_back(Column::numeric(std::move(values), c.missing()));
        }
        return Table(in.schema(), std::move(cols));
    }

    void save(serialize::FieldMap& f) const override {
        f.set_f64s("means", means_);
        f.set_f64s("stds", stds_);
    }

    static FittedTransformerPtr load(const serialize::FieldMap& f) {
        return std::make_shared<FittedScaler>(f.f64s("means"), f.f64s("stds"));
    }

private:
    std::vector<double> means_;
    std::vector<double> stds_;
};

class StandardScaler final : public Transformer {
public:
    std::string_view kind() const override { return "standard_scaler"; }

    FittedTransformerPtr fit(const Table& in) const override {
        std::vector<double> means;
        std::vector<double> stds;
        for (std::size_t i = 0; i < in.n_cols(); ++i) {
            const Column& c = in.column(i);
            if (c.kind() != ColumnKind::Numeric)
                fail(ErrorCode::NeedsEncoding,
                     "column '" + in.schema()[i].name + "' is categorical; encode before scaling");
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t r = 0; r < c.size(); ++r) {
                if (c.is_missing(r)) continue;
                sum += c.number(r);
                ++n;
            }
            const double mean = n ? sum / static_cast<double>(n) : 0.0;
            double ss = 0.0;
            for (std::size_t r = 0; r < c.size(); ++r) {
                if (c.is_missing(r)) continue;
                const double d = c.number(r) - mean;
                ss += d * d;
            }
            // population convention: divide by n
            means.push_back(mean);
            stds.push_back(n ? std::sqrt(ss / static_cast<double>(n)) : 0.0);
        }
        return std::make_shared<FittedScaler>(std::move(means), std::move(stds));
    }
};

// --------------------------------------------------------------------- pca

class FittedPca final : public FittedTransformer {
public:
    FittedPca(std::vector<double> means, Matrix components, std::vector<double> variances)
        : means_(std::move(means)), components_(std::move(components)),
          variances_(std::move(variances)) {}

    std::string_view kind() const override { return "pca"; }

    Table transform(const Table& in) const override {
        const Matrix x = to_matrix(in);
        if (x.cols() != means_.size())
            fail(ErrorCode::SchemaMismatch, "pca was fit on a different column count");
        const std::size_t k = variances_.size();
        std::vector<ColumnSchema> schema;
        std::vector<std::vector<double>> out(k, std::vector<double>(x.rows(), 0.0));
        for (std::size_t j = 0; j < k; ++j)
            schema.push_back({"pc" + std::to_string(j + 1), ColumnKind::Numeric});
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t j = 0; j < k; ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < means_.size(); ++i)
                    dot += (x.at(r, i) - means_[i]) * components_.at(i, j);
                out[j][r] = dot;
            }
        }
        std::vector<Column> cols;
        for (std::size_t j = 0; j < k; ++j) cols.push_back(Column::numeric(std::move(out[j])));
        return Table(std::move(schema), std::move(cols));
    }

    const Matrix& components() const { return components_; }
    const std::vector<double>& explained_variance() const { return variances_; }
    const std::vector<double>& means() const { return means_; }

    void save(serialize::FieldMap& f) const override {
        f.set_f64s("means", means_);
        f.set_f64s("variances", variances_);
        f.set_u64s("shape", {components_.rows(), components_.cols()});
        f.set_f64s("components", components_.data());
    }

    static FittedTransformerPtr load(const serialize::FieldMap& f) {
        const auto& shape = f.u64s("shape");
        if (shape.size() != 2) fail(ErrorCode::NotAModelFile, "bad pca shape");
        Matrix comp(shape[0], shape[1]);
        const auto& data = f.f64s("components");
        if (data.size() != shape[0] * shape[1]) fail(ErrorCode::NotAModelFile, "bad pca payload");
        for (std::size_t i = 0; i < data.size(); ++i)
            comp.at(i / shape[1], i % shape[1]) = data[i];
        return std::make_shared<FittedPca>(f.f64s("means"), std::move(comp), f.f64s("variances"));
    }

private:
    std::vector<double> means_;
    Matrix components_;  // d x k, columns orthonormal
    std::vector<double> variances_;
};

class Pca final : public Transformer {
public:
    explicit Pca(std::size_t k) : k_(k) {}

    std::string_view kind() const override { return "pca"; }

    FittedTransformerPtr fit(const Table& in) const override {
        const Matrix x = to_matrix(in);
        const std::size_t n = x.rows();
        const std::size_t d = x.cols();
        if (k_ < 1 || k_ > d)
            fail(ErrorCode::InvalidComponents,
                 "n_components " + std::to_string(k_) + " out of range [1, " + std::to_string(d) + "]");
        if (n < 2) fail(ErrorCode::EmptyInput, "pca needs at least 2 rows");

        std::vector<double> means(d, 0.0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t i = 0; i < d; ++i) means[i] += x.at(r, i);
        for (auto& m : means) m /= static_cast<double>(n);

        Matrix cov(d, d, 0.0);  // sample covariance (1/(n-1))
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t i = 0; i < d; ++i) {
                const double di = x.at(r, i) - means[i];
                for (std::size_t j = i; j < d; ++j)
                    cov.at(i, j) += di * (x.at(r, j) - means[j]);
            }
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) {
                cov.at(i, j) /= static_cast<double>(n - 1);
                cov.at(j, i) = cov.at(i, j);
            }

        const auto eig = linalg::sym_eigen(cov);
        Matrix comp(d, k_);
        std::vector<double> variances(k_);
        for (std::size_t j = 0; j < k_; ++j) {
            variances[j] = eig.values[j];
            // sign convention: largest-magnitude loading is positive
            std::size_t arg = 0;
            for (std::size_t i = 1; i < d; ++i)
                if (std::abs(eig.vectors.at(i, j)) > std::abs(eig.vectors.at(arg, j))) arg = i;
            const double flip = eig.vectors.at(arg, j) < 0.0 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < d; ++i) comp.at(i, j) = flip * eig.vectors.at(i, j);
        }
        return std::make_shared<FittedPca>(std::move(means), std::move(comp), std::move(variances));
    }

private:
    std::size_t k_;
};

// ----------------------------------------------------------------- one-hot

class FittedOneHot final : public FittedTransformer {
public:
    FittedOneHot(std::vector<std::string> columns, std::vector<std::vector<std::string>> categories)
        : columns_(std::move(columns)), categories_(std::move(categories)) {}

    std::string_view kind() const override { return "one_hot"; }

    Table transform(const Table& in) const override {
        std::vector<ColumnSchema> schema;
        std::vector<Column> cols;
        for (std::size_t i = 0; i < in.n_cols(); ++i) {
            const Column& c = in.column(i);
            const std::string& name = in.schema()[i].name;
            auto it = std::find(columns_.begin(), columns_.end(), name);
            if (c.kind() != ColumnKind::Categorical || it == columns_.end()) {
                schema.push_back(in.schema()[i]);
                cols.push_back(c);
                continue;
            }
            const auto& cats = categories_[static_cast<std::size_t>(it - columns_.begin())];
            for (const auto& cat : cats) {
                std::vector<double> indicator(c.size(), 0.0);
                for (std::size_t r = 0; r < c.size(); ++r)
                    if (!c.is_missing(r) && c.label(r) == cat) indicator[r] = 1.0;
                schema.push_back({name + "=" + cat, ColumnKind::Numeric});
                cols.push_back(Column::numeric(std::move(indicator)));
            }
        }
        return Table(std::move(schema), std::move(cols));
    }

    void save(serialize::FieldMap& f) const override {
        f.set_strs("columns", columns_);
        std::vector<std::string> flat;
        std::vector<std::uint64_t> counts;
        for (const auto& cats : categories_) {
            counts.push_back(cats.size());
            flat.insert(flat.end(), cats.begin(), cats.end());
        }
        f.set_u64s("counts", std::move(counts));
        f.set_strs("categories", std::move(flat));
    }

    static FittedTransformerPtr load(const serialize::FieldMap& f) {
        const auto& counts = f.u64s("counts");
        const auto& flat = f.strs("categories");
        std::vector<std::vector<std::string>> categories;
        std::size_t pos = 0;
        for (std::uint64_t c : counts) {
            if (pos + c > flat.size()) fail(ErrorCode::NotAModelFile, "bad one_hot payload");
            categories.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                                    flat.begin() + static_cast<std::ptrdiff_t>(pos + c));
            pos += c;
        }
        return std::make_shared<FittedOneHot>(f.strs("columns"), std::move(categories));
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> categories_;
};

class OneHot final : public Transformer {
public:
    std::string_view kind() const override { return "one_hot"; }

    FittedTransformerPtr fit(const Table& in) const override {
        std::vector<std::string> columns;
        std::vector<std::vector<std::string>> categories;
        for (std::size_t i = 0; i < in.n_cols(); ++i) {
            const Column& c = in.column(i);
            if (c.kind() != ColumnKind::Categorical) continue;
            std::set<std::string> uniq;
            for (std::size_t r = 0; r < c.size(); ++r)
                if (!c.is_missing(r)) uniq.insert(c.label(r));
            columns.push_back(in.schema()[i].name);
            categories.emplace_back(uniq.begin(), uniq.end());
        }
        return std::make_shared<FittedOneHot>(std::move(columns), std::move(categories));
    }
};

}  // namespace

TransformerPtr make_mean_imputer() { return std::make_shared<MeanImputer>(); }
TransformerPtr make_mode_imputer() { return std::make_shared<ModeImputer>(); }
TransformerPtr make_standard_scaler() { return std::make_shared<StandardScaler>(); }
TransformerPtr make_pca(std::size_t n_components) { return std::make_shared<Pca>(n_components); }
TransformerPtr make_one_hot() { return std::make_shared<OneHot>(); }

FittedTransformerPtr load_fitted_transformer(std::string_view kind, const serialize::FieldMap& f) {
    if (kind == "mean_impute") return FittedMeanImputer::load(f);
    if (kind == "mode_impute") return FittedModeImputer::load(f);
    if (kind == "standard_scaler") return FittedScaler::load(f);
    if (kind == "pca") return FittedPca::load(f);
    if (kind == "one_hot") return FittedOneHot::load(f);
    fail(ErrorCode::NotAModelFile, "unknown transformer kind '" + std::string(kind) + "'");
}

// ------------------------------------------------------------------ splits

namespace {

std::vector<std::vector<std::size_t>> class_indices(const std::vector<int>& y) {
    std::vector<std::vector<std::size_t>> per_class(2);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) fail(ErrorCode::NotBinary, "labels must be 0/1");
        per_class[static_cast<std::size_t>(y[i])].push_back(i);
    }
    return per_class;
}

}  // namespace

StratifiedSplit stratified_split(const std::vector<int>& y, const SplitSpec& spec) {
    if (y.empty()) fail(ErrorCode::EmptyInput, "no rows to split");
    if (!(spec.train_size > 0.0 && spec.train_size < 1.0))
        fail(ErrorCode::BadConfig, "train_size must lie in (0, 1)");

    SplitMix64 rng(spec.seed);
    StratifiedSplit out;
    if (!spec.stratify) {
        std::vector<std::size_t> idx(y.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        shuffle(idx, rng);
        const std::size_t n_train =
            static_cast<std::size_t>(std::floor(spec.train_size * static_cast<double>(y.size())));
        out.train_indices.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test_indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    } else {
        for (auto& members : class_indices(y)) {
            if (members.size() < 2)
                fail(ErrorCode::CannotStratify, "a class has fewer than 2 members");
            shuffle(members, rng);
            const std::size_t n_train = static_cast<std::size_t>(
                std::floor(spec.train_size * static_cast<double>(members.size())));
            out.train_indices.insert(out.train_indices.end(), members.begin(),
                                     members.begin() + static_cast<std::ptrdiff_t>(n_train));
            out.test_indices.insert(out.test_indices.end(),
                                    members.begin() + static_cast<std::ptrdiff_t>(n_train),
                                    members.end());
        }
    }
    std::sort(out.train_indices.begin(), out.train_indices.end());
    std::sort(out.test_indices.begin(), out.test_indices.end());
    return out;
}

FoldPlan::FoldPlan(std::size_t k, std::vector<std::size_t> assignments)
    : k_(k), assignments_(std::move(assignments)) {
    std::vector<std::size_t> sizes(k_, 0);
    for (std::size_t a : assignments_) {
        if (a >= k_) fail(ErrorCode::BadConfig, "fold assignment out of range");
        ++sizes[a];
    }
    for (std::size_t s : sizes)
        if (s == 0) fail(ErrorCode::CannotStratify, "a fold is empty");
}

std::vector<std::size_t> FoldPlan::fold_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments_.size(); ++i)
        if (assignments_[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments_.size(); ++i)
        if (assignments_[i] != fold) out.push_back(i);
    return out;
}

FoldPlan stratified_kfold(const std::vector<int>& y, std::size_t k, std::uint64_t seed) {
    if (k < 2) fail(ErrorCode::BadConfig, "fold count must be at least 2");
    if (y.empty()) fail(ErrorCode::EmptyInput, "no rows to fold");

    SplitMix64 rng(seed);
    std::vector<std::size_t> assignments(y.size(), 0);
    std::size_t pointer = 0;  // carries across classes: global sizes stay within 1
    for (auto& members : class_indices(y)) {
        if (members.size() < k)
            fail(ErrorCode::CannotStratify,
                 "a class has fewer members than folds (" + std::to_string(members.size()) + " < " +
                     std::to_string(k) + ")");
        shuffle(members, rng);
        for (std::size_t m : members) assignments[m] = (pointer++) % k;
    }
    return FoldPlan(k, std::move(assignments));
}

}  // namespace autoflow
