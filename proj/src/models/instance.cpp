#include <algorithm>
#include <cmath>

#include "autoflow/error.hpp"
#include "models_internal.hpp"

namespace autoflow::detail {

namespace {

/// Brute-force k-nearest-neighbours; ties in distance break toward the lower
/// training index, so votes are deterministic.
class KnnModel final : public FittedModel {
public:
    KnnModel(Matrix train, std::vector<int> labels, std::size_t k)
        : FittedModel(ModelId::knn, train.cols()), train_(std::move(train)),
          labels_(std::move(labels)), k_(std::min(k, labels_.size())) {}

    void save_payload(serialize::FieldMap& f) const override {
        f.set_u64("k", k_);
        f.set_u64("rows", train_.rows());
        f.set_f64s("x", train_.data());
        std::vector<std::uint64_t> y(labels_.begin(), labels_.end());
        f.set_u64s("y", std::move(y));
    }

protected:
    std::vector<int> do_predict(const Matrix& x) const override {
        std::vector<int> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = positive_votes(x, r) * 2 >= k_ ? 1 : 0;
        return out;
    }

    std::vector<double> do_scores(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r)
            out[r] = static_cast<double>(positive_votes(x, r)) / static_cast<double>(k_);
        return out;
    }

private:
    std::size_t positive_votes(const Matrix& x, std::size_t r) const {
        std::vector<std::pair<double, std::size_t>> dist(train_.rows());
        for (std::size_t i = 0; i < train_.rows(); ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < train_.cols(); ++j) {
                const double diff = x.at(r, j) - train_.at(i, j);
                d2 += diff * diff;
            }
            dist[i] = {d2, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
        std::size_t pos = 0;
        for (std::size_t i = 0; i < k_; ++i) pos += static_cast<std::size_t>(labels_[dist[i].second]);
        return pos;
    }

    Matrix train_;
    std::vector<int> labels_;
    std::size_t k_;
};

/// Majority-class baseline: constant label, constant score equal to the
/// training positive rate.
class DummyModel final : public FittedModel {
public:
    DummyModel(int label, double rate, std::size_t d)
        : FittedModel(ModelId::dummy, d), label_(label), rate_(rate) {}

    void save_payload(serialize::FieldMap& f) const override {
        f.set_u64("label", static_cast<std::uint64_t>(label_));
        f.set_f64("rate", rate_);
    }

protected:
    std::vector<int> do_predict(const Matrix& x) const override {
        return std::vector<int>(x.rows(), label_);
    }

    std::vector<double> do_scores(const Matrix& x) const override {
        return std::vector<double>(x.rows(), rate_);
    }

private:
    int label_;
    double rate_;
};

}  // namespace

ModelPtr fit_knn(const ParamMap& p, const Matrix& x, const std::vector<int>& y) {
    const auto k = static_cast<std::size_t>(param(p, "k"));
    if (k < 1) fail(ErrorCode::BadConfig, "knn needs k >= 1");
    return std::make_shared<KnnModel>(x, y, k);
}

ModelPtr fit_dummy(const ParamMap&, const Matrix& x, const std::vector<int>& y) {
    std::size_t pos = 0;
    for (int v : y) pos += static_cast<std::size_t>(v);
    const std::size_t neg = y.size() - pos;
    const int label = pos > neg ? 1 : 0;  // tie goes to the lower label
    const double rate = static_cast<double>(pos) / static_cast<double>(y.size());
    return std::make_shared<DummyModel>(label, rate, x.cols());
}

ModelPtr load_instance(ModelId id, const serialize::FieldMap& f) {
    const std::size_t d = f.u64("n_features");
    if (id == ModelId::dummy)
        return std::make_shared<DummyModel>(static_cast<int>(f.u64("label")), f.f64("rate"), d);

    const std::size_t rows = f.u64("rows");
    const auto& data = f.f64s("x");
    if (data.size() != rows * d) fail(ErrorCode::NotAModelFile, "bad knn payload");
    Matrix train(rows, d);
    for (std::size_t i = 0; i < data.size(); ++i) train.at(i / d, i % d) = data[i];
    const auto& ys = f.u64s("y");
    std::vector<int> labels(ys.begin(), ys.end());
    return std::make_shared<KnnModel>(std::move(train), std::move(labels), f.u64("k"));
}

}  // namespace autoflow::detail
