#include "autoflow/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace autoflow::linalg {

Cholesky::Cholesky(const std::vector<double>& a, std::size_t n) : n_(n), l_(n * n, 0.0) {
    ok_ = true;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) sum -= l_[i * n + k] * l_[j * n + k];
            if (i == j) {
                if (sum <= 0.0 || !std::isfinite(sum)) {
                    ok_ = false;
                    return;
                }
                l_[i * n + i] = std::sqrt(sum);
            } else {
                l_[i * n + j] = sum / l_[j * n + j];
            }
        }
    }
}

double Cholesky::log_det() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += std::log(l_[i * n_ + i]);
    return 2.0 * s;
}

std::vector<double> Cholesky::solve(std::vector<double> b) const {
    // forward L y = b, then backward L^T x = y
    for (std::size_t i = 0; i < n_; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= l_[i * n_ + k] * b[k];
        b[i] = sum / l_[i * n_ + i];
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        double sum = b[ii];
        for (std::size_t k = ii + 1; k < n_; ++k) sum -= l_[k * n_ + ii] * b[k];
        b[ii] = sum / l_[ii * n_ + ii];
    }
    return b;
}

std::vector<double> solve_spd(const std::vector<double>& a, std::vector<double> b, std::size_t n) {
    Cholesky ch(a, n);
    if (!ch.ok()) throw std::runtime_error("solve_spd: matrix not positive definite");
    return ch.solve(std::move(b));
}

SymEigen sym_eigen(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix m = a;
    Matrix v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m.at(p, q) * m.at(p, q);
        if (off < 1e-24) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m.at(k, p);
                    const double mkq = m.at(k, q);
                    m.at(k, p) = c * mkp - s * mkq;
                    m.at(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m.at(p, k);
                    const double mqk = m.at(q, k);
                    m.at(p, k) = c * mpk - s * mqk;
                    m.at(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v.at(k, p);
                    const double vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - s * vkq;
                    v.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < n; ++i)           // selection sort: descending eigenvalue
        for (std::size_t j = i + 1; j < n; ++j)
            if (m.at(order[j], order[j]) > m.at(order[i], order[i])) std::swap(order[i], order[j]);

    SymEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = m.at(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors.at(i, j) = v.at(i, order[j]);
    }
    return out;
}

}  // namespace autoflow::linalg
