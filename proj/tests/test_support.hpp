#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "autoflow/error.hpp"
#include "autoflow/matrix.hpp"
#include "autoflow/rng.hpp"
#include "autoflow/tabular.hpp"
#include "doctest.h"

namespace testsup {

/// Runs fn and returns the ErrorCode it throws; fails the test if it doesn't.
inline autoflow::ErrorCode error_code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const autoflow::Error& e) {
        return e.code();
    }
    FAIL("expected an autoflow::Error");
    return autoflow::ErrorCode::BadConfig;
}

inline double gaussian(autoflow::SplitMix64& rng) {
    // Box-Muller; one draw per call keeps tests simple
    double u1 = rng.next_unit();
    if (u1 <= 0.0) u1 = 1e-12;
    const double u2 = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline autoflow::Matrix random_matrix(std::size_t rows, std::size_t cols,
                                      autoflow::SplitMix64& rng) {
    autoflow::Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = gaussian(rng);
    return m;
}

inline std::vector<int> random_labels(std::size_t n, autoflow::SplitMix64& rng) {
    std::vector<int> y(n);
    for (;;) {
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.next_below(2) ? 1 : 0;
            (y[i] ? has1 : has0) = true;
        }
        if (has0 && has1) return y;
    }
}

/// Labels correlated with the first feature so trees have signal to split on.
inline std::vector<int> signal_labels(const autoflow::Matrix& x, autoflow::SplitMix64& rng) {
    std::vector<int> y(x.rows());
    for (;;) {
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            y[i] = (x.at(i, 0) + 0.5 * gaussian(rng)) > 0.0 ? 1 : 0;
            (y[i] ? has1 : has0) = true;
        }
        if (has0 && has1) return y;
    }
}

inline autoflow::Table table_from(const autoflow::Matrix& m, const std::string& prefix = "f") {
    std::vector<autoflow::ColumnSchema> schema;
    std::vector<autoflow::Column> cols;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        schema.push_back({prefix + std::to_string(c), autoflow::ColumnKind::Numeric});
        std::vector<double> values(m.rows());
        for (std::size_t r = 0; r < m.rows(); ++r) values[r] = m.at(r, c);
        cols.push_back(autoflow::Column::numeric(std::move(values)));
    }
    return autoflow::Table(std::move(schema), std::move(cols));
}

/// The 4-point XOR problem.
inline autoflow::Matrix xor_matrix() {
    return autoflow::Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

inline std::vector<int> xor_labels() { return {0, 1, 1, 0}; }

/// Two well-separated clusters: 20 copies of each prototype with jitter.
inline void separable_set(autoflow::Matrix& x, std::vector<int>& y) {
    autoflow::SplitMix64 rng(404);
    x = autoflow::Matrix(40, 2);
    y.assign(40, 0);
    for (std::size_t i = 0; i < 40; ++i) {
        const bool pos = i >= 20;
        x.at(i, 0) = (pos ? 10.0 : 0.0) + 0.1 * gaussian(rng);
        x.at(i, 1) = (pos ? 10.0 : 0.0) + 0.1 * gaussian(rng);
        y[i] = pos ? 1 : 0;
    }
}

inline std::string pima_path() { return PIMA_CSV_PATH; }

}  // namespace testsup
