#pragma once

#include <cstddef>
#include <utility>

#include <Eigen/Dense>

#include "netinf/linalg.hpp"
#include "netinf/rng.hpp"

namespace netinf {

/// Parameters of the noisy linear Gaussian network dynamics
///   X(t) = X(t-1) A + W(t),  Y(t) = X(t) + Z(t),  t = 0..horizon,
/// with W ~ N(0, sigma2 I), Z ~ N(0, nu2 I), and a dynamic Erdos-Renyi
/// prior (edge probability p, target spectral radius r0) on A.
struct ModelParams {
  std::size_t n = 10;
  std::size_t horizon = 20;
  double sigma2 = 1.0;
  double nu2 = 0.0;
  double p = 0.2;
  double r0 = 0.8;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

using SupportMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Weighted adjacency; entry (i, j) is the coefficient of edge i -> j.
struct AdjacencyMatrix {
  Matrix weights;

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
  /// 0/1 matrix marking the nonzero weights.
  SupportMatrix support() const;
};

/// Rademacher signs and Bernoulli support drawn independently for all n^2
/// entries.
struct SignedSupport {
  SupportMatrix signs;
  SupportMatrix support;

  /// Entrywise product signs * support, as a real matrix.
  Matrix signed_graph() const;
};

/// Observations Y(0..T), row t holding Y(t).
struct ObservationSeries {
  Matrix samples;

  std::size_t horizon() const { return static_cast<std::size_t>(samples.rows()) - 1; }
  std::size_t size() const { return static_cast<std::size_t>(samples.cols()); }
};

/// r0 * A / r(A) when r(A) != 0, otherwise A unchanged.
///
/// For integer-valued A (the signed graphs produced by the prior) the test
/// r(A) = 0 is exact: A is nilpotent iff its graph is acyclic or A^n vanishes
/// modulo two large primes. Eigenvalue routines cannot make that call since
/// a nilpotent block of size k perturbs eigenvalues by eps^(1/k). Other
/// matrices fall back to the numerical radius.
Matrix scale_to_radius(const Matrix& a, double r0);

/// True when the integer-valued matrix `a` is nilpotent.
bool is_nilpotent_integer(const Matrix& a);

/// Builds s(signs * support) for the given signed support.
AdjacencyMatrix adjacency_from(const SignedSupport& draw, double r0);

/// One draw from the dynamic ER prior. Signs for all n^2 entries are drawn
/// first (row-major), then the support.
std::pair<SignedSupport, AdjacencyMatrix> sample_dynamic_er(const ModelParams& params, Rng& rng);

/// Simulates a stationary trajectory. X(0) is drawn through the Cholesky
/// factor of the stationary covariance.
ObservationSeries simulate_trajectory(const AdjacencyMatrix& a, const ModelParams& params,
                                      Rng& rng);

/// Exact covariance of the stacked row vector (Y(0), ..., Y(T)).
///
/// Block (s, t), s <= t, is Q A^(t-s) plus nu2 I on the diagonal, where Q
/// solves Q = A^T Q A + sigma2 I; block (t, s) is its transpose.
Matrix observation_covariance(const AdjacencyMatrix& a, const ModelParams& params);

/// Covariance of X(T) started from X(0) = 0: sigma2 * sum_{m<T} (A^m)^T A^m.
Matrix zero_start_covariance(const Matrix& a, double sigma2, std::size_t horizon);

}  // namespace netinf
