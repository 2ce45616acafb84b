#include "netinf/model.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "netinf/errors.hpp"

namespace netinf {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// 2^61 - 1 and 2^62 - 57.
constexpr u64 kPrimes[] = {2305843009213693951ULL, 4611686018427387847ULL};

using ModMatrix = std::vector<u64>;

ModMatrix mod_multiply(const ModMatrix& x, const ModMatrix& y, std::size_t n, u64 prime) {
  ModMatrix out(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const u64 xik = x[i * n + k];
      if (xik == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const u64 ykj = y[k * n + j];
        if (ykj == 0) continue;
        out[i * n + j] = static_cast<u64>((static_cast<u128>(xik) * ykj + out[i * n + j]) % prime);
      }
    }
  }
  return out;
}

bool vanishes_mod(const Matrix& a, u64 prime) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  ModMatrix power(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = static_cast<long long>(a(i, j));
      const u64 mag = static_cast<u64>(v < 0 ? -v : v) % prime;
      power[i * n + j] = (v < 0 && mag != 0) ? prime - mag : mag;
    }
  }
  // A is nilpotent iff A^(2^k) = 0 for 2^k >= n. Every power of a nilpotent
  // matrix has zero trace, which rejects most cyclic graphs after one square.
  for (std::size_t reach = 1; reach < n; reach *= 2) {
    power = mod_multiply(power, power, n, prime);
    u64 trace = 0;
    for (std::size_t i = 0; i < n; ++i) trace = (trace + power[i * n + i]) % prime;
    if (trace != 0) return false;
  }
  for (u64 v : power) {
    if (v != 0) return false;
  }
  return true;
}

bool graph_is_acyclic(const Matrix& a) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) != 0.0) ++indegree[j];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t j = 0; j < n; ++j) {
    if (indegree[j] == 0) ready.push_back(j);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    const std::size_t i = ready.back();
    ready.pop_back();
    ++removed;
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) != 0.0 && --indegree[j] == 0) ready.push_back(j);
    }
  }
  return removed == n;
}

bool is_integer_valued(const Matrix& a) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double v = a.data()[k];
    if (v != std::round(v) || std::abs(v) > 1e15) return false;
  }
  return true;
}

void require_stable(const Matrix& a, const char* what) {
  const double radius = spectral_radius(a);
  if (radius >= 1.0) {
    throw StabilityError(std::string(what) + ": spectral radius " + std::to_string(radius) +
                         " >= 1");
  }
}

}  // namespace

void ModelParams::validate() const {
  if (n < 1) throw InvalidArgument("model: n must be >= 1");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InvalidArgument("model: sigma2 must be positive");
  }
  if (!(nu2 >= 0.0) || !std::isfinite(nu2)) throw InvalidArgument("model: nu2 must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("model: p must be in [0, 1]");
  if (!(r0 > 0.0 && r0 < 1.0)) throw InvalidArgument("model: r0 must be in (0, 1)");
}

SupportMatrix AdjacencyMatrix::support() const {
  return (weights.array() != 0.0).cast<int>().matrix();
}

Matrix SignedSupport::signed_graph() const {
  return signs.cwiseProduct(support).cast<double>();
}

bool is_nilpotent_integer(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("is_nilpotent_integer: matrix not square");
  if (!is_integer_valued(a)) throw InvalidArgument("is_nilpotent_integer: non-integer entry");
  if (graph_is_acyclic(a)) return true;
  for (u64 prime : kPrimes) {
    if (!vanishes_mod(a, prime)) return false;
  }
  return true;
}

Matrix scale_to_radius(const Matrix& a, double r0) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError("scale_to_radius: expected a square matrix");
  }
  if (is_integer_valued(a)) {
    if (is_nilpotent_integer(a)) return a;
    return r0 * a / spectral_radius(a);
  }
  const double radius = spectral_radius(a);
  if (radius <= 1e-12 * std::max(1.0, max_norm(a))) return a;
  return r0 * a / radius;
}

AdjacencyMatrix adjacency_from(const SignedSupport& draw, double r0) {
  return AdjacencyMatrix{scale_to_radius(draw.signed_graph(), r0)};
}

std::pair<SignedSupport, AdjacencyMatrix> sample_dynamic_er(const ModelParams& params,
                                                            Rng& rng) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(params.n);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution edge(params.p);
  SignedSupport draw{SupportMatrix(n, n), SupportMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) draw.signs(i, j) = coin(rng) ? 1 : -1;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) draw.support(i, j) = edge(rng) ? 1 : 0;
  }
  AdjacencyMatrix adjacency = adjacency_from(draw, params.r0);
  return {std::move(draw), std::move(adjacency)};
}

ObservationSeries simulate_trajectory(const AdjacencyMatrix& a, const ModelParams& params,
                                      Rng& rng) {
  params.validate();
  const Eigen::Index n = a.weights.rows();
  if (a.weights.cols() != n || n == 0) throw DimensionError("simulate_trajectory: bad adjacency");
  require_stable(a.weights, "simulate_trajectory");

  const Matrix q = solve_discrete_lyapunov(a.weights, params.sigma2);
  const Matrix chol = CholeskyFactor(q).lower();
  const double drive_sd = std::sqrt(params.sigma2);
  const double obs_sd = std::sqrt(params.nu2);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto steps = static_cast<Eigen::Index>(params.horizon) + 1;
  Matrix states(steps, n);
  Vector z(n);
  for (Eigen::Index k = 0; k < n; ++k) z(k) = gauss(rng);
  states.row(0) = (chol * z).transpose();
  for (Eigen::Index t = 1; t < steps; ++t) {
    for (Eigen::Index k = 0; k < n; ++k) z(k) = drive_sd * gauss(rng);
    states.row(t) = states.row(t - 1) * a.weights + z.transpose();
  }
  ObservationSeries series{std::move(states)};
  if (params.nu2 > 0.0) {
    for (Eigen::Index t = 0; t < steps; ++t) {
      for (Eigen::Index k = 0; k < n; ++k) series.samples(t, k) += obs_sd * gauss(rng);
    }
  }
  return series;
}

Matrix observation_covariance(const AdjacencyMatrix& a, const ModelParams& params) {
  params.validate();
  const Eigen::Index n = a.weights.rows();
  if (a.weights.cols() != n || n == 0) {
    throw DimensionError("observation_covariance: bad adjacency");
  }
  require_stable(a.weights, "observation_covariance");

  const Matrix q = solve_discrete_lyapunov(a.weights, params.sigma2);
  const auto steps = static_cast<Eigen::Index>(params.horizon) + 1;

  // lag_blocks[k] = Q A^k, shared by every block pair at lag k.
  std::vector<Matrix> lag_blocks;
  lag_blocks.reserve(static_cast<std::size_t>(steps));
  lag_blocks.push_back(q);
  for (Eigen::Index k = 1; k < steps; ++k) lag_blocks.push_back(lag_blocks.back() * a.weights);

  Matrix cov(n * steps, n * steps);
  for (Eigen::Index s = 0; s < steps; ++s) {
    for (Eigen::Index t = s; t < steps; ++t) {
      const Matrix& block = lag_blocks[static_cast<std::size_t>(t - s)];
      cov.block(s * n, t * n, n, n) = block;
      cov.block(t * n, s * n, n, n) = block.transpose();
    }
    cov.block(s * n, s * n, n, n) = 0.5 * (q + q.transpose());
    cov.block(s * n, s * n, n, n).diagonal().array() += params.nu2;
  }
  return cov;
}

Matrix zero_start_covariance(const Matrix& a, double sigma2, std::size_t horizon) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError("zero_start_covariance: expected a square matrix");
  }
  if (horizon < 1) throw InvalidArgument("zero_start_covariance: horizon must be >= 1");
  const Eigen::Index n = a.rows();
  Matrix power = Matrix::Identity(n, n);
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t m = 0; m < horizon; ++m) {
    sum.noalias() += power.transpose() * power;
    power = power * a;
  }
  return sigma2 * sum;
}

}  // namespace netinf
