#include <cmath>

#include <doctest.h>

#include "netinf/errors.hpp"
#include "netinf/model.hpp"

using namespace netinf;

namespace {

Matrix example1_edge(double a) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = a;
  return m;
}

// Empirical covariance of the columns of `samples` (mean known to be zero),
// with the standard error of each entry estimated from the same draws.
struct Moments {
  Matrix cov;
  Matrix std_error;
};

Moments zero_mean_moments(const Matrix& samples) {
  const double m = static_cast<double>(samples.rows());
  const Eigen::Index d = samples.cols();
  Moments out{Matrix::Zero(d, d), Matrix::Zero(d, d)};
  Matrix second = Matrix::Zero(d, d);
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    const Vector x = samples.row(r).transpose();
    const Matrix outer = x * x.transpose();
    out.cov += outer;
    second += outer.cwiseProduct(outer);
  }
  out.cov /= m;
  second /= m;
  out.std_error = ((second - out.cov.cwiseProduct(out.cov)) / m).cwiseSqrt();
  return out;
}

void check_within(const Moments& got, const Matrix& expected, double k) {
  for (Eigen::Index i = 0; i < expected.rows(); ++i) {
    for (Eigen::Index j = 0; j < expected.cols(); ++j) {
      INFO("entry (" << i << ", " << j << ")");
      CHECK(std::abs(got.cov(i, j) - expected(i, j)) <= k * got.std_error(i, j) + 1e-12);
    }
  }
}

}  // namespace

TEST_CASE("ModelParams validation") {
  ModelParams ok;
  CHECK_NOTHROW(ok.validate());
  auto bad = ok;
  bad.sigma2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ok;
  bad.nu2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ok;
  bad.p = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ok;
  bad.r0 = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ok;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("is_nilpotent_integer agrees with exact integer powers") {
  Rng rng = derive_stream(21, "nilpotent-test");
  std::uniform_int_distribution<int> entry(-1, 1);
  std::bernoulli_distribution sparse(0.3);
  int nilpotent_cyclic = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (sparse(rng)) a.data()[k] = entry(rng);
    }
    // Entries are small integers, so doubles hold A^n exactly.
    Matrix power = Matrix::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) power = power * a;
    const bool expected = power.isZero(0.0);
    CHECK(is_nilpotent_integer(a) == expected);
    if (expected && a.diagonal().cwiseAbs().sum() > 0) ++nilpotent_cyclic;
  }
  MESSAGE("nilpotent draws with self-loops: " << nilpotent_cyclic);
}

TEST_CASE("is_nilpotent_integer handles cyclic nilpotent matrices") {
  Matrix a(2, 2);
  a << 1, 1, -1, -1;
  CHECK(is_nilpotent_integer(a));
  CHECK(scale_to_radius(a, 0.8) == a);

  Matrix rotation(2, 2);
  rotation << 0, 1, -1, 0;
  CHECK_FALSE(is_nilpotent_integer(rotation));
  CHECK(std::abs(spectral_radius(scale_to_radius(rotation, 0.8)) - 0.8) < 1e-12);

  Matrix half(1, 1);
  half << 0.5;
  CHECK_THROWS_AS(is_nilpotent_integer(half), InvalidArgument);
}

TEST_CASE("scale_to_radius") {
  Matrix a(2, 2);
  a << 0.2, 1.5, -0.4, 0.3;
  CHECK(std::abs(spectral_radius(scale_to_radius(a, 0.7)) - 0.7) < 1e-12);
  CHECK(scale_to_radius(Matrix::Zero(3, 3), 0.8).isZero(0.0));
  Matrix strictly_upper(3, 3);
  strictly_upper << 0, 1, 1, 0, 0, -1, 0, 0, 0;
  CHECK(scale_to_radius(strictly_upper, 0.8) == strictly_upper);
}

TEST_CASE("dynamic ER draws are rescaled to r0 or left at zero") {
  ModelParams params;
  params.n = 10;
  params.p = 0.2;
  Rng rng = derive_stream(22, "er-test");
  for (int trial = 0; trial < 200; ++trial) {
    const auto [draw, adjacency] = sample_dynamic_er(params, rng);
    CHECK(adjacency.support() == draw.support);
    if (is_nilpotent_integer(draw.signed_graph())) {
      CHECK(adjacency.weights == draw.signed_graph());
    } else {
      CHECK(std::abs(spectral_radius(adjacency.weights) - params.r0) < 1e-8);
    }
  }

  params.p = 0.0;
  const auto [empty_draw, empty] = sample_dynamic_er(params, rng);
  CHECK(empty.weights.isZero(0.0));
  CHECK(empty_draw.signs.cwiseAbs().minCoeff() == 1);
}

TEST_CASE("sample_dynamic_er and simulate_trajectory are deterministic per stream") {
  ModelParams params;
  params.nu2 = 0.5;
  Rng a = derive_stream(23, "sim", {4});
  Rng b = derive_stream(23, "sim", {4});
  const auto da = sample_dynamic_er(params, a);
  const auto db = sample_dynamic_er(params, b);
  CHECK(da.second.weights == db.second.weights);
  const ObservationSeries sa = simulate_trajectory(da.second, params, a);
  const ObservationSeries sb = simulate_trajectory(db.second, params, b);
  CHECK(sa.samples == sb.samples);
  CHECK(sa.horizon() == params.horizon);
  CHECK(sa.size() == params.n);
}

TEST_CASE("simulate_trajectory rejects unstable networks") {
  ModelParams params;
  params.n = 2;
  Rng rng = derive_stream(24, "unstable");
  CHECK_THROWS_AS(simulate_trajectory(AdjacencyMatrix{Matrix::Identity(2, 2)}, params, rng),
                  StabilityError);
}

TEST_CASE("independent noise: sample covariance of Y(t) matches sigma2 I") {
  ModelParams params;
  params.n = 3;
  params.horizon = 0;
  params.sigma2 = 1.7;
  Rng rng = derive_stream(25, "iid");
  const AdjacencyMatrix zero{Matrix::Zero(3, 3)};
  Matrix samples(100000, 3);
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    samples.row(r) = simulate_trajectory(zero, params, rng).samples.row(0);
  }
  check_within(zero_mean_moments(samples), 1.7 * Matrix::Identity(3, 3), 3.0);
}

TEST_CASE("single-edge network: stationary variance of the child") {
  ModelParams params;
  params.n = 2;
  params.horizon = 5;
  params.nu2 = 0.5;
  Rng rng = derive_stream(26, "edge-var");
  const AdjacencyMatrix edge{example1_edge(1.0)};
  Matrix samples(100000, 1);
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    samples(r, 0) = simulate_trajectory(edge, params, rng).samples(5, 1);
  }
  check_within(zero_mean_moments(samples), Matrix::Constant(1, 1, 2.0 + 0.5), 3.0);
}

TEST_CASE("observation_covariance closed forms") {
  ModelParams params;
  params.n = 2;
  params.horizon = 0;
  params.nu2 = 0.3;
  const AdjacencyMatrix edge{example1_edge(1.0)};
  Matrix expected(2, 2);
  expected << 1.3, 0, 0, 2.3;
  CHECK((observation_covariance(edge, params) - expected).cwiseAbs().maxCoeff() < 1e-14);

  params.horizon = 4;
  params.sigma2 = 2.0;
  const Matrix iid = observation_covariance(AdjacencyMatrix{Matrix::Zero(2, 2)}, params);
  CHECK(iid.isApprox(2.3 * Matrix::Identity(10, 10)));
}

TEST_CASE("observation_covariance is symmetric positive definite on ER draws") {
  ModelParams params;
  params.nu2 = 1.0;
  Rng rng = derive_stream(27, "cov-pd");
  for (int trial = 0; trial < 20; ++trial) {
    params.nu2 = trial % 2;
    const auto [draw, adjacency] = sample_dynamic_er(params, rng);
    const Matrix cov = observation_covariance(adjacency, params);
    CHECK(max_norm(cov - cov.transpose()) <= 1e-10);
    CHECK_NOTHROW(CholeskyFactor{cov});
  }
}

TEST_CASE("observation_covariance matches simulated trajectories") {
  ModelParams params;
  params.n = 2;
  params.horizon = 3;
  params.nu2 = 0.5;
  const AdjacencyMatrix edge{example1_edge(0.9)};
  Rng rng = derive_stream(28, "cov-mc");
  Matrix samples(1000000, 8);
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    const ObservationSeries s = simulate_trajectory(edge, params, rng);
    for (Eigen::Index t = 0; t < 4; ++t) samples.block(r, 2 * t, 1, 2) = s.samples.row(t);
  }
  check_within(zero_mean_moments(samples), observation_covariance(edge, params), 4.0);
}

TEST_CASE("trajectories are stationary on ER draws") {
  ModelParams params;
  params.n = 3;
  params.p = 0.5;
  params.horizon = 8;
  Rng rng = derive_stream(29, "stationary");
  const auto [draw, adjacency] = sample_dynamic_er(params, rng);
  Matrix first(100000, 3), last(100000, 3);
  for (Eigen::Index r = 0; r < first.rows(); ++r) {
    const ObservationSeries s = simulate_trajectory(adjacency, params, rng);
    first.row(r) = s.samples.row(0);
    last.row(r) = s.samples.row(8);
  }
  const Moments m0 = zero_mean_moments(first);
  const Moments mt = zero_mean_moments(last);
  for (Eigen::Index k = 0; k < 9; ++k) {
    const double se = std::hypot(m0.std_error.data()[k], mt.std_error.data()[k]);
    CHECK(std::abs(m0.cov.data()[k] - mt.cov.data()[k]) <= 4.0 * se);
  }
}

TEST_CASE("zero_start_covariance") {
  CHECK(zero_start_covariance(Matrix::Ones(3, 3) * 0.2, 1.5, 1).isApprox(1.5 * Matrix::Identity(3, 3)));
  CHECK(zero_start_covariance(Matrix::Zero(2, 2), 1.0, 7).isApprox(Matrix::Identity(2, 2)));
  Matrix shift(2, 2);
  shift << 0, 1, 0, 0;
  Matrix expected(2, 2);
  expected << 1, 0, 0, 2;
  CHECK(zero_start_covariance(shift, 1.0, 2) == expected);
  CHECK_THROWS_AS(zero_start_covariance(shift, 1.0, 0), InvalidArgument);

  Matrix a(2, 2);
  a << 0.3, 0.4, -0.2, 0.5;
  const Matrix stationary = solve_discrete_lyapunov(a, 1.0);
  CHECK(max_norm(zero_start_covariance(a, 1.0, 200) - stationary) < 1e-10);
}
