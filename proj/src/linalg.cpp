#include "safe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace safe {

CovarianceMatrix::CovarianceMatrix(std::size_t dim, std::vector<double> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_) {
        throw InvalidParameterError("covariance entries length does not match dim^2");
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i + 1; j < dim_; ++j) {
            const double a = at(i, j);
            const double b = at(j, i);
            if (!std::isfinite(a) || !std::isfinite(b)) {
                throw InvalidParameterError("covariance entry is not finite");
            }
            const double scale = std::max(std::abs(a), std::abs(b));
            if (std::abs(a - b) > 1e-12 * scale) {
                throw InvalidParameterError(
                    "covariance matrix is not symmetric at (" + std::to_string(i) +
                    "," + std::to_string(j) + ")");
            }
        }
    }
}

CovarianceMatrix CovarianceMatrix::identity(std::size_t dim) {
    std::vector<double> e(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1.0;
    return CovarianceMatrix(dim, std::move(e));
}

CovarianceMatrix CovarianceMatrix::diagonal(const std::vector<double>& diag) {
    const std::size_t dim = diag.size();
    std::vector<double> e(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = diag[i];
    return CovarianceMatrix(dim, std::move(e));
}

CovarianceMatrix CovarianceMatrix::zero(std::size_t dim) {
    return CovarianceMatrix(dim, std::vector<double>(dim * dim, 0.0));
}

namespace {

// Returns the 1-based offending leading minor, or 0 on success.
int try_cholesky(const CovarianceMatrix& cov, double jitter, Matrix& out) {
    const std::size_t k = cov.dim();
    out = Matrix(k, k);
    // Tolerance for treating a pivot as an exact zero (semi-definite direction).
    double max_diag = 0.0;
    for (std::size_t i = 0; i < k; ++i) max_diag = std::max(max_diag, std::abs(cov.at(i, i)));
    const double zero_tol = 1e-12 * std::max(1.0, max_diag);

    for (std::size_t j = 0; j < k; ++j) {
        double d = cov.at(j, j) + jitter;
        for (std::size_t t = 0; t < j; ++t) d -= out.at(j, t) * out.at(j, t);
        if (d < -zero_tol) return static_cast<int>(j) + 1;
        if (d <= zero_tol) {
            // Semi-definite pivot: the whole column must vanish.
            out.at(j, j) = 0.0;
            for (std::size_t i = j + 1; i < k; ++i) {
                double s = cov.at(i, j);
                for (std::size_t t = 0; t < j; ++t) s -= out.at(i, t) * out.at(j, t);
                if (std::abs(s) > zero_tol) return static_cast<int>(j) + 1;
                out.at(i, j) = 0.0;
            }
            continue;
        }
        const double l = std::sqrt(d);
        out.at(j, j) = l;
        for (std::size_t i = j + 1; i < k; ++i) {
            double s = cov.at(i, j);
            for (std::size_t t = 0; t < j; ++t) s -= out.at(i, t) * out.at(j, t);
            out.at(i, j) = s / l;
        }
    }
    return 0;
}

}  // namespace

Matrix cholesky_lower(const CovarianceMatrix& cov) {
    Matrix L;
    int minor = try_cholesky(cov, 0.0, L);
    if (minor == 0) return L;

    double max_diag = 0.0;
    for (std::size_t i = 0; i < cov.dim(); ++i) {
        max_diag = std::max(max_diag, std::abs(cov.at(i, i)));
    }
    minor = try_cholesky(cov, 1e-10 * max_diag, L);
    if (minor == 0) return L;

    throw DecompositionError(
        "covariance is not positive semi-definite: leading minor " +
        std::to_string(minor) + " is not positive (after jitter retry)",
        minor);
}

}  // namespace safe
