#pragma once

#include <cstddef>
#include <vector>

#include "autoflow/matrix.hpp"

namespace autoflow::linalg {

/// Cholesky factorization A = L L^T of a symmetric positive definite matrix
/// (row-major, n x n). Used by the linear solvers and the Gaussian
/// discriminants, which also need the log-determinant.
class Cholesky {
public:
    Cholesky(const std::vector<double>& a, std::size_t n);

    bool ok() const { return ok_; }
    double log_det() const;
    std::vector<double> solve(std::vector<double> b) const;

private:
    std::size_t n_ = 0;
    std::vector<double> l_;
    bool ok_ = false;
};

/// Solves A x = b for SPD A; throws on a non-positive-definite matrix.
std::vector<double> solve_spd(const std::vector<double>& a, std::vector<double> b, std::size_t n);

struct SymEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // column j pairs with values[j]
};

/// Eigendecomposition of a symmetric matrix via the cyclic Jacobi method.
/// Exact enough for the small covariance matrices this library sees, and
/// deterministic, which keeps principal components reproducible.
SymEigen sym_eigen(const Matrix& a);

}  // namespace autoflow::linalg
