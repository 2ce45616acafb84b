#include "netinf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netinf/bht.hpp"
#include "netinf/errors.hpp"
#include "netinf/net_bounds.hpp"
#include "netinf/parallel.hpp"
#include "netinf/recovery.hpp"

namespace netinf {
namespace {

void require_unit(double rho, const char* what) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument(std::string(what) + ": rho outside [0, 1]");
}

// Standard error of sum(num) / sum(den) by the delta method.
double ratio_std_error(std::span<const double> num, std::span<const double> den) {
  const std::size_t count = num.size();
  if (count < 2) return 0.0;
  double num_sum = 0.0;
  double den_sum = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    num_sum += num[s];
    den_sum += den[s];
  }
  if (den_sum <= 0.0) return 0.0;
  const double ratio = num_sum / den_sum;
  double squares = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const double dev = num[s] - ratio * den[s];
    squares += dev * dev;
  }
  const auto c = static_cast<double>(count);
  return std::sqrt(squares / (c * (c - 1.0))) / (den_sum / c);
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  missed_edges += other.missed_edges;
  true_edges += other.true_edges;
  false_edges += other.false_edges;
  true_nonedges += other.true_nonedges;
  return *this;
}

ConfusionCounts confusion(const SupportMatrix& truth, const SupportMatrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw DimensionError("confusion: truth and estimate differ in shape");
  }
  ConfusionCounts counts;
  for (Eigen::Index k = 0; k < truth.size(); ++k) {
    const bool edge = truth.data()[k] != 0;
    const bool predicted = estimate.data()[k] != 0;
    if (edge) {
      ++counts.true_edges;
      if (!predicted) ++counts.missed_edges;
    } else {
      ++counts.true_nonedges;
      if (predicted) ++counts.false_edges;
    }
  }
  return counts;
}

ErrorRatios error_ratios(const ConfusionCounts& totals) {
  if (totals.true_edges == 0) throw DegenerateBatchError("error_ratios: batch holds no edges");
  if (totals.true_nonedges == 0) {
    throw DegenerateBatchError("error_ratios: batch holds no non-edges");
  }
  return ErrorRatios{
      static_cast<double>(totals.missed_edges) / static_cast<double>(totals.true_edges),
      static_cast<double>(totals.false_edges) / static_cast<double>(totals.true_nonedges)};
}

ErrorRatios error_ratios(std::span<const SupportMatrix> truths,
                         std::span<const SupportMatrix> estimates) {
  if (truths.size() != estimates.size()) {
    throw DimensionError("error_ratios: truth and estimate lists differ in length");
  }
  ConfusionCounts totals;
  for (std::size_t k = 0; k < truths.size(); ++k) totals += confusion(truths[k], estimates[k]);
  return error_ratios(totals);
}

std::string_view algorithm_name(Algorithm algorithm) {
  return algorithm == Algorithm::lasso ? "lasso" : "ocse";
}

std::vector<RocSweepPoint> roc_sweep(Algorithm algorithm, std::span<const double> grid,
                                     const ModelParams& params, const RocSweepOptions& options) {
  params.validate();
  if (grid.empty()) throw InvalidArgument("roc_sweep: empty parameter grid");
  if (options.sims < 1) throw InvalidArgument("roc_sweep: sims must be >= 1");
  if (params.horizon < 2) throw InvalidArgument("roc_sweep: horizon must be >= 2");

  const std::size_t sims = options.sims;
  // counts[g * sims + s]
  std::vector<ConfusionCounts> counts(grid.size() * sims);
  parallel_for(sims, options.threads, [&](std::size_t s) {
    Rng sim_rng = derive_stream(options.seed, "roc-sim", {s});
    const auto [draw, adjacency] = sample_dynamic_er(params, sim_rng);
    const ObservationSeries series = simulate_trajectory(adjacency, params, sim_rng);
    const SupportMatrix truth = adjacency.support();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      SupportMatrix estimate;
      if (algorithm == Algorithm::lasso) {
        LassoConfig cfg;
        cfg.lambda = grid[g];
        estimate = lasso_support(series, cfg);
      } else {
        OcseConfig cfg;
        cfg.theta = grid[g];
        cfg.num_perms = options.num_perms;
        Rng perm_rng = derive_stream(options.seed, "roc-ocse", {s});
        estimate = ocse_support(series, cfg, perm_rng);
      }
      counts[g * sims + s] = confusion(truth, estimate);
    }
  });

  std::vector<RocSweepPoint> out;
  out.reserve(grid.size());
  std::vector<double> missed(sims), edges(sims), false_alarms(sims), nonedges(sims);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    ConfusionCounts totals;
    for (std::size_t s = 0; s < sims; ++s) {
      const ConfusionCounts& c = counts[g * sims + s];
      totals += c;
      missed[s] = static_cast<double>(c.missed_edges);
      edges[s] = static_cast<double>(c.true_edges);
      false_alarms[s] = static_cast<double>(c.false_edges);
      nonedges[s] = static_cast<double>(c.true_nonedges);
    }
    const ErrorRatios ratios = error_ratios(totals);
    out.push_back(RocSweepPoint{grid[g],
                                RocPoint{ratios.eps_plus, 1.0 - ratios.eps_minus},
                                ratio_std_error(false_alarms, nonedges),
                                ratio_std_error(missed, edges)});
  }
  return out;
}

double auc_bound_simple(double rho) {
  require_unit(rho, "auc_bound_simple");
  return 1.0 - std::pow(rho, 4) / 6.0;
}

double auc_bound_shapiro(double rho) {
  require_unit(rho, "auc_bound_shapiro");
  const double gap = 1.0 - std::sqrt(1.0 - rho * rho);
  return 1.0 - gap * gap / 2.0;
}

double auc_bound_numerical(double rho, std::span<const double> fpr_grid,
                           std::span<const double> pi_grid) {
  require_unit(rho, "auc_bound_numerical");
  if (fpr_grid.size() < 2) throw InvalidArgument("auc_bound_numerical: fpr grid too small");
  std::vector<double> bounds;
  bounds.reserve(pi_grid.size());
  for (double pi : pi_grid) bounds.push_back(lb_direct(rho, pi));
  const auto envelope = roc_upper_envelope(pi_grid, bounds, fpr_grid);
  double area = 0.0;
  for (std::size_t k = 1; k < envelope.size(); ++k) {
    area += 0.5 * (envelope[k].tpr + envelope[k - 1].tpr) * (envelope[k].fpr - envelope[k - 1].fpr);
  }
  return area;
}

std::vector<std::vector<std::size_t>> column_supports(const Matrix& a) {
  std::vector<std::vector<std::size_t>> supports(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != 0.0) supports[static_cast<std::size_t>(j)].push_back(static_cast<std::size_t>(i));
    }
  }
  return supports;
}

double mip(const Matrix& q, const std::vector<std::vector<std::size_t>>& supports) {
  if (q.rows() != q.cols()) throw DimensionError("mip: covariance must be square");
  const Eigen::Index n = q.rows();
  if (static_cast<Eigen::Index>(supports.size()) != n) {
    throw DimensionError("mip: one support set per column required");
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < supports.size(); ++j) {
    const auto& set = supports[j];
    if (set.empty()) continue;
    const auto k = static_cast<Eigen::Index>(set.size());
    Matrix principal(k, k);
    Matrix cross(k, n);
    std::vector<bool> inside(static_cast<std::size_t>(n), false);
    for (Eigen::Index r = 0; r < k; ++r) {
      const auto row = static_cast<Eigen::Index>(set[static_cast<std::size_t>(r)]);
      if (row >= n) throw DimensionError("mip: support index out of range");
      inside[static_cast<std::size_t>(row)] = true;
      cross.row(r) = q.row(row);
      for (Eigen::Index c = 0; c < k; ++c) {
        principal(r, c) = q(row, static_cast<Eigen::Index>(set[static_cast<std::size_t>(c)]));
      }
    }
    Matrix coefficients;
    try {
      coefficients = CholeskyFactor(principal).solve(cross);
    } catch (const Error& e) {
      throw NumericalError("mip: column " + std::to_string(j) + ": " + e.what());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (inside[static_cast<std::size_t>(i)]) continue;
      worst = std::max(worst, coefficients.col(i).lpNorm<1>());
    }
  }
  return worst;
}

std::vector<MipPoint> mip_curve(const ModelParams& params, std::span<const std::size_t> horizons,
                                std::size_t draws, std::uint64_t seed, unsigned threads) {
  params.validate();
  if (horizons.empty()) throw InvalidArgument("mip_curve: empty horizon grid");
  if (draws < 1) throw InvalidArgument("mip_curve: draws must be >= 1");
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    if (horizons[k] < 1 || (k > 0 && horizons[k] <= horizons[k - 1])) {
      throw InvalidArgument("mip_curve: horizons must be increasing and >= 1");
    }
  }
  // values[d * horizons + h]
  std::vector<double> values(draws * horizons.size());
  parallel_for(draws, threads, [&](std::size_t d) {
    Rng rng = derive_stream(seed, "mip", {d});
    const auto [draw, adjacency] = sample_dynamic_er(params, rng);
    const Matrix& a = adjacency.weights;
    const auto supports = column_supports(a);
    const Eigen::Index n = a.rows();
    // Running sum of (A^m)^T A^m, sampled at each requested horizon.
    Matrix power = Matrix::Identity(n, n);
    Matrix sum = Matrix::Zero(n, n);
    std::size_t next = 0;
    for (std::size_t m = 1; next < horizons.size(); ++m) {
      sum.noalias() += power.transpose() * power;
      power = power * a;
      if (m == horizons[next]) {
        values[d * horizons.size() + next] = mip(params.sigma2 * sum, supports);
        ++next;
      }
    }
  });

  std::vector<MipPoint> out;
  const auto count = static_cast<double>(draws);
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    double total = 0.0;
    for (std::size_t d = 0; d < draws; ++d) total += values[d * horizons.size() + h];
    const double mean = total / count;
    double squares = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
      const double dev = values[d * horizons.size() + h] - mean;
      squares += dev * dev;
    }
    const double se = draws > 1 ? std::sqrt(squares / (count - 1.0) / count) : 0.0;
    out.push_back(MipPoint{horizons[h], mean, se});
  }
  return out;
}

DominanceReport envelope_dominance(std::span<const RocSweepPoint> points,
                                   std::span<const double> pis,
                                   std::span<const BoundEstimate> bounds, double tolerance_se,
                                   double low_fpr) {
  std::vector<double> values;
  std::vector<double> errors;
  for (const auto& b : bounds) {
    values.push_back(b.value);
    errors.push_back(b.std_error);
  }
  DominanceReport report;
  for (const auto& p : points) {
    const EnvelopeValue env = envelope_at(p.point.fpr, pis, values, errors);
    const double excess = p.point.tpr - env.tpr_upper;
    const double se = std::hypot(env.std_error, p.tpr_std_error);
    const double scaled = se > 0.0 ? excess / se
                          : excess > 1e-12 ? std::numeric_limits<double>::infinity()
                                           : (excess < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
    ++report.points;
    report.worst_excess = std::max(report.worst_excess, scaled);
    if (excess > 1e-12 && scaled > tolerance_se) ++report.violations;
    if (p.point.fpr <= low_fpr) report.low_fpr_gap = std::max(report.low_fpr_gap, -excess);
  }
  return report;
}

}  // namespace netinf
