#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "gammasum/core_cdf.hpp"

namespace gammasum {

/// Dense symmetric matrix, row-major storage.
class SymMatrix {
  public:
    SymMatrix() = default;

    /// Throws DomainError if the entries are not finite or the matrix is not
    /// symmetric within 1e-12 of its largest entry. The stored matrix is the
    /// exact average of the input and its transpose.
    SymMatrix(std::size_t dim, std::vector<double> entries);

    static SymMatrix identity(std::size_t dim);
    static SymMatrix diagonal(const std::vector<double>& values);

    std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
    const std::vector<double>& entries() const noexcept { return a_; }

    double max_abs() const;

  private:
    std::size_t dim_ = 0;
    std::vector<double> a_;
};

/// Eigenvalues in ascending order; column k of vectors (row-major dim x dim)
/// is the unit eigenvector of values[k].
struct EigenDecomp {
    std::size_t dim = 0;
    std::vector<double> values;
    std::vector<double> vectors;

    double vector(std::size_t row, std::size_t k) const { return vectors[row * dim + k]; }
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius mass falls below
/// 1e-14 ||A||_F. Throws NonConvergence after 100 sweeps.
EigenDecomp jacobi_eigen(const SymMatrix& a);

/// Throws DefinitenessError unless every eigenvalue exceeds dim * 1e-14 * lambda_max.
void require_positive_definite(const EigenDecomp& e, std::string_view name);

/// V diag(sqrt w) V' for positive definite a.
SymMatrix sym_sqrt(const SymMatrix& a);

/// Determinant as the product of eigenvalues.
double determinant(const SymMatrix& a);

/// Lower Cholesky factor L (row-major) with L L' = a.
std::vector<double> cholesky(const SymMatrix& a);

/// Ascending eigenvalues of Sigma^{1/2} C Sigma^{1/2}.
std::vector<double> qform_eigenvalues(const SymMatrix& sigma, const SymMatrix& c);

/// P{X'CX <= x} for X ~ N(0, Sigma).
///
/// X'CX = sum_j lambda_j Z_j^2 and Z_j^2 / 2 ~ Gamma(1/2, 1), so
/// Q / 2 = sum_j lambda_j (Z_j^2 / 2) is a gamma sum with shapes 1/2 and scales
/// lambda_j, and P{Q <= x} is its CDF at x / 2.
CdfEstimate qform_cdf(const SymMatrix& sigma, const SymMatrix& c, double x,
                      const QuadratureConfig& cfg = {});

}  // namespace gammasum
