#pragma once

#include <cstddef>
#include <vector>

#include "safe/errors.hpp"

namespace safe {

// Dense row-major matrix, sized for the tiny systems used here (k <= 4).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Symmetric PSD matrix wrapper; symmetry is validated on construction.
class CovarianceMatrix {
public:
    CovarianceMatrix() = default;

    // `entries` is row-major k*k. Throws InvalidParameterError if the matrix is
    // not symmetric to 1e-12 relative tolerance.
    CovarianceMatrix(std::size_t dim, std::vector<double> entries);

    static CovarianceMatrix identity(std::size_t dim);
    static CovarianceMatrix diagonal(const std::vector<double>& diag);
    static CovarianceMatrix zero(std::size_t dim);

    std::size_t dim() const { return dim_; }
    double at(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
    double& at(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
    const std::vector<double>& entries() const { return entries_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> entries_;
};

// Lower-triangular Cholesky factor with L*L^T == cov.
// If the plain decomposition fails, the diagonal is jittered once by
// 1e-10 * max(diag) and retried; a second failure throws DecompositionError
// naming the offending leading minor. Positive semi-definite inputs with
// exactly-zero directions (e.g. the zero matrix) succeed without jitter.
Matrix cholesky_lower(const CovarianceMatrix& cov);

}  // namespace safe
