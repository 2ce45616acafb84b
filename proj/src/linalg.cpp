#include "netinf/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "netinf/errors.hpp"

namespace netinf {
namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kPivotFloor = 1e-12;
constexpr double kLyapunovStep = 1e-14;
constexpr long kLyapunovMaxIterations = 1'000'000;
constexpr double kBcOvershoot = 1e-12;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

void require_symmetric(const Matrix& m, const char* what) {
  const double scale = std::max(1.0, max_norm(m));
  if (max_norm(m - m.transpose()) > kSymmetryTolerance * scale) {
    throw InvalidArgument(std::string(what) + ": matrix is not symmetric");
  }
}

}  // namespace

double spectral_radius(const Matrix& a) {
  require_square(a, "spectral_radius");
  require_finite(a, "spectral_radius");
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_radius: eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix solve_discrete_lyapunov(const Matrix& a, double c) {
  require_square(a, "solve_discrete_lyapunov");
  require_finite(a, "solve_discrete_lyapunov");
  if (!(c > 0.0)) throw InvalidArgument("solve_discrete_lyapunov: c must be positive");
  const double radius = spectral_radius(a);
  if (radius >= 1.0) {
    throw StabilityError("solve_discrete_lyapunov: spectral radius " + std::to_string(radius) +
                         " >= 1");
  }

  const Eigen::Index n = a.rows();
  const Matrix driving = c * Matrix::Identity(n, n);
  const Matrix a_t = a.transpose();
  Matrix q = driving;
  for (long it = 0; it < kLyapunovMaxIterations; ++it) {
    Matrix next = a_t * q * a + driving;
    const double step = max_norm(next - q);
    q = std::move(next);
    if (step < kLyapunovStep * std::max(1.0, max_norm(q))) {
      return 0.5 * (q + q.transpose());
    }
  }
  throw NumericalError("solve_discrete_lyapunov: no convergence after 10^6 iterations");
}

CholeskyFactor::CholeskyFactor(const Matrix& m) {
  require_square(m, "cholesky");
  require_finite(m, "cholesky");
  require_symmetric(m, "cholesky");
  llt_.compute(0.5 * (m + m.transpose()));
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("cholesky: matrix is not positive definite");
  }
  const auto diag = llt_.matrixLLT().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (diag(i) * diag(i) <= kPivotFloor) {
      throw NotPositiveDefiniteError("cholesky: pivot " + std::to_string(i) +
                                     " at or below 1e-12");
    }
  }
}

double CholeskyFactor::log_determinant() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Vector CholeskyFactor::solve(const Vector& b) const { return llt_.solve(b); }

Matrix CholeskyFactor::solve(const Matrix& b) const { return llt_.solve(b); }

Matrix CholeskyFactor::lower() const { return llt_.matrixL(); }

double logdet_pd(const Matrix& m) { return CholeskyFactor(m).log_determinant(); }

double gaussian_bc(const GaussianSpec& p, const GaussianSpec& q) {
  const Eigen::Index n = p.mean.size();
  if (p.covariance.rows() != n || q.mean.size() != n || q.covariance.rows() != n) {
    throw DimensionError("gaussian_bc: mean and covariance dimensions disagree");
  }
  const CholeskyFactor fp(p.covariance);
  const CholeskyFactor fq(q.covariance);
  const CholeskyFactor favg(0.5 * (p.covariance + q.covariance));

  const Vector delta = p.mean - q.mean;
  const double mahalanobis = delta.size() == 0 ? 0.0 : delta.dot(favg.solve(delta));
  const double log_rho = -mahalanobis / 8.0 + 0.25 * fp.log_determinant() +
                         0.25 * fq.log_determinant() - 0.5 * favg.log_determinant();
  const double rho = std::exp(log_rho);
  if (rho > 1.0) {
    if (rho - 1.0 <= kBcOvershoot) return 1.0;
    throw NumericalError("gaussian_bc: coefficient " + std::to_string(rho) + " exceeds 1");
  }
  return rho;
}

double gaussian_bc_zero_mean(const Matrix& cov_p, const Matrix& cov_q) {
  const Vector zero = Vector::Zero(cov_p.rows());
  return gaussian_bc({zero, cov_p}, {zero, cov_q});
}

}  // namespace netinf
