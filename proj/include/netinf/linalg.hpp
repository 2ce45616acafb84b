#pragma once

#include <Eigen/Dense>

namespace netinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Mean and covariance of a multivariate normal distribution.
struct GaussianSpec {
  Vector mean;
  Matrix covariance;
};

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Matrix& a);

/// Solves Q = A^T Q A + c I by fixed-point iteration starting from Q = c I.
/// Throws StabilityError when spectral_radius(a) >= 1 and NumericalError
/// when the iteration does not settle within 10^6 steps.
Matrix solve_discrete_lyapunov(const Matrix& a, double c);

/// Cholesky factor of a symmetric positive-definite matrix.
///
/// The input is symmetrized as (M + M^T) / 2 before factoring. A pivot
/// (squared diagonal entry of the factor) at or below 1e-12 is reported as
/// NotPositiveDefiniteError.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Matrix& m);

  double log_determinant() const;
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  /// Returns L with M = L L^T.
  Matrix lower() const;

 private:
  Eigen::LLT<Matrix> llt_;
};

/// log det M for symmetric positive-definite M, through its Cholesky factor.
double logdet_pd(const Matrix& m);

/// Bhattacharyya coefficient of two Gaussians, evaluated in log space.
double gaussian_bc(const GaussianSpec& p, const GaussianSpec& q);

/// Same as gaussian_bc for two zero-mean Gaussians.
double gaussian_bc_zero_mean(const Matrix& cov_p, const Matrix& cov_q);

/// Max-norm of a matrix (largest absolute entry).
inline double max_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace netinf
