#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "netinf/bht.hpp"
#include "netinf/errors.hpp"
#include "netinf/metrics.hpp"

using namespace netinf;

namespace {

SupportMatrix support_from(std::initializer_list<int> values, Eigen::Index n) {
  SupportMatrix m(n, n);
  auto it = values.begin();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = *it++;
  }
  return m;
}

}  // namespace

TEST_CASE("error_ratios on hand-counted batches") {
  const SupportMatrix truth = support_from({0, 1, 1, 0}, 2);
  const std::vector<SupportMatrix> truths{truth};
  CHECK(error_ratios(truths, truths).eps_minus == 0.0);
  CHECK(error_ratios(truths, truths).eps_plus == 0.0);

  const std::vector<SupportMatrix> ones{SupportMatrix::Ones(2, 2)};
  CHECK(error_ratios(truths, ones).eps_minus == 0.0);
  CHECK(error_ratios(truths, ones).eps_plus == 1.0);

  // First instance: 2 edges, one missed, 2 non-edges. Second: 1 edge,
  // 3 non-edges, one false alarm.
  const std::vector<SupportMatrix> batch{support_from({1, 1, 0, 0}, 2),
                                         support_from({0, 0, 1, 0}, 2)};
  const std::vector<SupportMatrix> guesses{support_from({1, 0, 0, 0}, 2),
                                           support_from({0, 1, 1, 0}, 2)};
  const ErrorRatios r = error_ratios(batch, guesses);
  CHECK(r.eps_minus == doctest::Approx(1.0 / 3));
  CHECK(r.eps_plus == doctest::Approx(1.0 / 5));

  const std::vector<SupportMatrix> empty{SupportMatrix::Zero(2, 2)};
  CHECK_THROWS_AS(error_ratios(empty, empty), DegenerateBatchError);
  CHECK_THROWS_AS(error_ratios(ones, ones), DegenerateBatchError);
  CHECK_THROWS_AS(confusion(truth, SupportMatrix::Zero(3, 3)), DimensionError);
}

TEST_CASE("error_ratios equal the edge-weighted average of per-pair error rates") {
  std::mt19937_64 rng(61);
  std::bernoulli_distribution coin(0.3);
  const Eigen::Index n = 4;
  std::vector<SupportMatrix> truths, estimates;
  for (int k = 0; k < 50; ++k) {
    SupportMatrix t(n, n), e(n, n);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      t.data()[i] = coin(rng);
      e.data()[i] = coin(rng);
    }
    truths.push_back(t);
    estimates.push_back(e);
  }
  // Per-pair counts over the batch.
  Matrix edges = Matrix::Zero(n, n), misses = Matrix::Zero(n, n);
  Matrix nonedges = Matrix::Zero(n, n), alarms = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < truths.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (truths[k](i, j)) {
          edges(i, j) += 1;
          misses(i, j) += estimates[k](i, j) ? 0 : 1;
        } else {
          nonedges(i, j) += 1;
          alarms(i, j) += estimates[k](i, j) ? 1 : 0;
        }
      }
    }
  }
  const EdgeWeights w = edge_weights(edges / 50.0);
  double eps_minus = 0.0, eps_plus = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (edges(i, j) > 0) eps_minus += w.w_minus(i, j) * misses(i, j) / edges(i, j);
      if (nonedges(i, j) > 0) eps_plus += w.w_plus(i, j) * alarms(i, j) / nonedges(i, j);
    }
  }
  const ErrorRatios r = error_ratios(truths, estimates);
  CHECK(r.eps_minus == doctest::Approx(eps_minus).epsilon(1e-12));
  CHECK(r.eps_plus == doctest::Approx(eps_plus).epsilon(1e-12));
}

TEST_CASE("roc_sweep extremes and thread independence") {
  ModelParams params;
  params.horizon = 20;
  RocSweepOptions options;
  options.sims = 12;
  options.seed = 62;
  const std::vector<double> lambdas{0.0, 1e6};
  const auto points = roc_sweep(Algorithm::lasso, lambdas, params, options);
  REQUIRE(points.size() == 2);
  CHECK(points[0].point.fpr > 0.95);
  CHECK(points[0].point.tpr == 1.0);
  CHECK(points[1].point.fpr == 0.0);
  CHECK(points[1].point.tpr == 0.0);
  CHECK(points[1].fpr_std_error == 0.0);

  const std::vector<double> thetas{0.01, 0.2, 0.6};
  options.num_perms = 40;
  const auto serial = roc_sweep(Algorithm::ocse, thetas, params, options);
  options.threads = 3;
  const auto threaded = roc_sweep(Algorithm::ocse, thetas, params, options);
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    CHECK(serial[k].point.fpr == threaded[k].point.fpr);
    CHECK(serial[k].point.tpr == threaded[k].point.tpr);
    CHECK(serial[k].tpr_std_error == threaded[k].tpr_std_error);
    if (k > 0) {
      CHECK(serial[k].point.fpr >= serial[k - 1].point.fpr);
      CHECK(serial[k].point.tpr >= serial[k - 1].point.tpr);
    }
  }
  CHECK_THROWS_AS(roc_sweep(Algorithm::lasso, {}, params, options), InvalidArgument);
}

TEST_CASE("AUC bounds closed forms") {
  CHECK(auc_bound_simple(0.0) == 1.0);
  CHECK(auc_bound_simple(1.0) == doctest::Approx(5.0 / 6));
  CHECK(auc_bound_simple(0.5) == doctest::Approx(0.989583333333333).epsilon(1e-13));
  CHECK(auc_bound_shapiro(0.0) == 1.0);
  CHECK(auc_bound_shapiro(1.0) == doctest::Approx(0.5));
  CHECK(auc_bound_shapiro(0.6) == doctest::Approx(0.98).epsilon(1e-13));
  CHECK_THROWS_AS(auc_bound_simple(1.1), InvalidArgument);

  const auto fpr = unit_grid(201);
  const PiGrid pis = PiGrid::uniform(0.0005, 0.9995, 1001);
  CHECK(auc_bound_numerical(0.0, fpr, pis.values()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(auc_bound_numerical(1.0, fpr, pis.values()) - 0.5) < 1e-9);
}

TEST_CASE("AUC bounds order and monotonicity on a rho grid") {
  const auto fpr = unit_grid(201);
  const PiGrid pis = PiGrid::uniform(0.0005, 0.9995, 1001);
  double prev_simple = 2, prev_shapiro = 2, prev_numerical = 2;
  for (int k = 1; k <= 19; ++k) {
    const double rho = 0.05 * k;
    const double simple = auc_bound_simple(rho);
    const double shapiro = auc_bound_shapiro(rho);
    const double numerical = auc_bound_numerical(rho, fpr, pis.values());
    INFO("rho = " << rho);
    CHECK(numerical <= shapiro + 1e-9);
    if (rho <= 0.64) CHECK(simple <= shapiro);
    CHECK(simple <= prev_simple);
    CHECK(shapiro <= prev_shapiro);
    CHECK(numerical <= prev_numerical);
    prev_simple = simple;
    prev_shapiro = shapiro;
    prev_numerical = numerical;
  }
}

TEST_CASE("mip closed forms") {
  const std::vector<std::vector<std::size_t>> supports{{1}, {0, 2}, {}};
  CHECK(mip(Matrix::Identity(3, 3), supports) == 0.0);
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 1, 2, 3;
  CHECK(mip(diag, supports) == 0.0);

  Matrix q(2, 2);
  q << 2, 1.5, 1.5, 2;
  CHECK(mip(q, {{0}, {}}) == doctest::Approx(0.75));
  CHECK(mip(q, {{}, {}}) == 0.0);
  CHECK_THROWS_AS(mip(q, {{0}}), DimensionError);
  CHECK_THROWS_AS(mip(Matrix::Ones(2, 2), {{0, 1}, {}}), NumericalError);
}

TEST_CASE("mip agrees with an explicit inverse") {
  std::mt19937_64 rng(63);
  std::normal_distribution<double> gauss;
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 6;
    Matrix m(n, n);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = gauss(rng);
    const Matrix q = m * m.transpose() + Matrix::Identity(n, n);
    std::vector<std::vector<std::size_t>> supports(n);
    for (auto& s : supports) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        if (coin(rng)) s.push_back(i);
      }
    }
    double expected = 0.0;
    for (const auto& s : supports) {
      if (s.empty()) continue;
      const auto k = static_cast<Eigen::Index>(s.size());
      Matrix sub(k, k);
      for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = q(s[r], s[c]);
      }
      const Matrix inv = sub.inverse();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::find(s.begin(), s.end(), static_cast<std::size_t>(i)) != s.end()) continue;
        Vector row(k);
        for (Eigen::Index c = 0; c < k; ++c) row(c) = q(i, s[c]);
        expected = std::max(expected, (row.transpose() * inv).lpNorm<1>());
      }
    }
    CHECK(mip(q, supports) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("column_supports") {
  Matrix a(2, 3);
  a << 0, 1, 0, 2, 0, 0;
  const auto s = column_supports(a);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == std::vector<std::size_t>{1});
  CHECK(s[1] == std::vector<std::size_t>{0});
  CHECK(s[2].empty());
}

TEST_CASE("mip_curve matches direct evaluation and ignores thread count") {
  ModelParams params;
  params.n = 20;
  params.p = 0.1;
  const std::vector<std::size_t> horizons{1, 3, 10};
  const auto serial = mip_curve(params, horizons, 4, 64, 1);
  const auto threaded = mip_curve(params, horizons, 4, 64, 2);
  REQUIRE(serial.size() == 3);
  for (std::size_t h = 0; h < 3; ++h) {
    CHECK(serial[h].horizon == horizons[h]);
    CHECK(serial[h].mean == threaded[h].mean);
    CHECK(serial[h].std_error == threaded[h].std_error);
  }
  // Horizon 1 gives Q = sigma2 I, so the MIP is zero.
  CHECK(serial[0].mean == 0.0);

  double total = 0.0;
  for (std::size_t d = 0; d < 4; ++d) {
    Rng rng = derive_stream(64, "mip", {d});
    const auto [draw, adjacency] = sample_dynamic_er(params, rng);
    total += mip(zero_start_covariance(adjacency.weights, params.sigma2, 10),
                 column_supports(adjacency.weights));
  }
  CHECK(serial[2].mean == doctest::Approx(total / 4).epsilon(1e-12));
  const std::vector<std::size_t> bad{3, 2};
  CHECK_THROWS_AS(mip_curve(params, bad, 2, 1), InvalidArgument);
}

TEST_CASE("envelope_dominance") {
  const std::vector<double> pis{0.25, 0.5, 0.75};
  std::vector<BoundEstimate> bounds(3);
  for (std::size_t k = 0; k < 3; ++k) bounds[k] = {lb_direct(0.8, pis[k]), 0.01, 100};

  std::vector<double> values;
  for (const auto& b : bounds) values.push_back(b.value);
  const double env0 = envelope_at(0.05, pis, values).tpr_upper;

  std::vector<RocSweepPoint> points{{0.1, {0.05, env0 - 0.2}, 0.0, 0.01},
                                    {0.2, {0.05, env0 + 0.001}, 0.0, 0.01}};
  DominanceReport report = envelope_dominance(points, pis, bounds);
  CHECK(report.points == 2);
  CHECK(report.violations == 0);
  CHECK(report.low_fpr_gap == doctest::Approx(0.2));

  points.push_back({0.3, {0.05, std::min(1.0, env0 + 0.2)}, 0.0, 0.01});
  report = envelope_dominance(points, pis, bounds);
  CHECK(report.violations == 1);
  CHECK(report.worst_excess > 2.0);
}
