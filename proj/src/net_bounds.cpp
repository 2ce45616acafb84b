#include "netinf/net_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netinf/bht.hpp"
#include "netinf/errors.hpp"
#include "netinf/parallel.hpp"

namespace netinf {
namespace {

constexpr double kWeightSumTolerance = 1e-12;
constexpr double kBoundSlack = 1e-12;

void require_pi(double pi) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw InvalidArgument("pi must lie in [0, 1]");
}

}  // namespace

EdgeWeights edge_weights(const Matrix& edge_probs) {
  if (edge_probs.size() == 0) throw DimensionError("edge_weights: empty matrix");
  if ((edge_probs.array() < 0.0).any() || (edge_probs.array() > 1.0).any() ||
      !edge_probs.allFinite()) {
    throw InvalidArgument("edge_weights: probabilities must lie in [0, 1]");
  }
  const Matrix absent = (1.0 - edge_probs.array()).matrix();
  const double present_total = edge_probs.sum();
  const double absent_total = absent.sum();
  if (present_total <= 0.0) throw DegeneratePriorError("edge_weights: no pair can hold an edge");
  if (absent_total <= 0.0) throw DegeneratePriorError("edge_weights: every pair is an edge");
  return EdgeWeights{edge_probs / present_total, absent / absent_total};
}

double direct_network_bound(const Matrix& rhos, const EdgeWeights& weights, double pi) {
  require_pi(pi);
  if (rhos.rows() != weights.w_minus.rows() || rhos.cols() != weights.w_minus.cols() ||
      rhos.rows() != weights.w_plus.rows() || rhos.cols() != weights.w_plus.cols()) {
    throw DimensionError("direct_network_bound: shape mismatch");
  }
  if (std::abs(weights.w_minus.sum() - 1.0) > kWeightSumTolerance ||
      std::abs(weights.w_plus.sum() - 1.0) > kWeightSumTolerance) {
    throw InvalidArgument("direct_network_bound: weights must each sum to 1");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < rhos.rows(); ++i) {
    for (Eigen::Index j = 0; j < rhos.cols(); ++j) {
      const double w = std::min(weights.w_minus(i, j), weights.w_plus(i, j));
      if (w == 0.0) continue;
      total += 2.0 * lb_direct(rhos(i, j), pi) * w;
    }
  }
  return 0.5 * total;
}

PiGrid::PiGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("pi grid: empty");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] > 0.0 && values_[k] < 1.0)) {
      throw InvalidArgument("pi grid: values must lie strictly inside (0, 1)");
    }
    if (k > 0 && !(values_[k] > values_[k - 1])) {
      throw InvalidArgument("pi grid: values must be strictly increasing");
    }
  }
}

PiGrid PiGrid::uniform(double lo, double hi, std::size_t count) {
  if (count == 1) return PiGrid({lo});
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    values[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return PiGrid(std::move(values));
}

PairSampler dynamic_er_pair_sampler(const ModelParams& params) {
  params.validate();
  return [params](Rng& rng) {
    auto [draw, adjacency] = sample_dynamic_er(params, rng);
    const auto n = static_cast<std::uint64_t>(params.n);
    const std::uint64_t flat = std::uniform_int_distribution<std::uint64_t>(0, n * n - 1)(rng);
    const auto i = static_cast<Eigen::Index>(flat / n);
    const auto j = static_cast<Eigen::Index>(flat % n);
    SignedSupport conditioned = draw;
    conditioned.support(i, j) = 0;
    Matrix without_edge = adjacency_from(conditioned, params.r0).weights;
    conditioned.support(i, j) = 1;
    Matrix with_edge = adjacency_from(conditioned, params.r0).weights;
    return ConditionedPair{std::move(without_edge), std::move(with_edge)};
  };
}

PairSampler fixed_pair_sampler(Matrix without_edge, Matrix with_edge) {
  return [a0 = std::move(without_edge), a1 = std::move(with_edge)](Rng&) {
    return ConditionedPair{a0, a1};
  };
}

double conditioned_pair_rho(const ConditionedPair& pair, const ModelParams& params) {
  return gaussian_bc_zero_mean(observation_covariance({pair.without_edge}, params),
                               observation_covariance({pair.with_edge}, params));
}

std::vector<double> side_info_rhos(const PairSampler& sampler, const ModelParams& params,
                                   std::size_t trials, std::uint64_t seed, unsigned threads) {
  std::vector<double> rhos(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    Rng rng = derive_stream(seed, "side-info", {k});
    try {
      rhos[k] = conditioned_pair_rho(sampler(rng), params);
    } catch (const NotPositiveDefiniteError& e) {
      throw NotPositiveDefiniteError("side-info trial " + std::to_string(k) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("side-info trial " + std::to_string(k) + ": " + e.what());
    }
  });
  return rhos;
}

BoundEstimate side_info_bound_from_rhos(std::span<const double> rhos, double pi) {
  require_pi(pi);
  if (rhos.size() < 2) throw InvalidArgument("side-info bound: at least two trials required");
  const double scale = 4.0 * pi * (1.0 - pi);
  const auto count = static_cast<double>(rhos.size());
  std::vector<double> summands;
  summands.reserve(rhos.size());
  for (double rho : rhos) {
    const double u = scale * rho * rho;
    if (u > 1.0 + kBoundSlack) throw NumericalError("side-info bound: coefficient exceeds 1");
    summands.push_back(std::sqrt(std::max(0.0, 1.0 - u)));
  }
  // Accumulate in trial order so the result is independent of scheduling.
  double sum = 0.0;
  for (double s : summands) sum += s;
  const double mean = sum / count;
  double squares = 0.0;
  for (double s : summands) squares += (s - mean) * (s - mean);
  const double sd = std::sqrt(squares / (count - 1.0));
  return BoundEstimate{0.5 * (1.0 - mean), 0.5 * sd / std::sqrt(count), rhos.size()};
}

BoundEstimate prop4_bound(const ModelParams& params, double pi, std::size_t trials, Rng& rng) {
  require_pi(pi);
  if (trials < 2) throw InvalidArgument("prop4_bound: trials must be >= 2");
  const std::uint64_t seed = draw_seed(rng);
  const auto rhos = side_info_rhos(dynamic_er_pair_sampler(params), params, trials, seed);
  return side_info_bound_from_rhos(rhos, pi);
}

std::vector<BoundEstimate> side_info_bound_curve(const PairSampler& sampler,
                                                 const ModelParams& params, const PiGrid& grid,
                                                 std::size_t trials, std::uint64_t seed,
                                                 unsigned threads) {
  if (trials < 2) throw InvalidArgument("side_info_bound_curve: trials must be >= 2");
  const auto rhos = side_info_rhos(sampler, params, trials, seed, threads);
  std::vector<BoundEstimate> curve;
  curve.reserve(grid.size());
  for (double pi : grid.values()) curve.push_back(side_info_bound_from_rhos(rhos, pi));
  return curve;
}

EnvelopeValue envelope_at(double fpr, std::span<const double> pis, std::span<const double> bounds,
                          std::span<const double> std_errors) {
  if (pis.size() != bounds.size() || pis.empty()) {
    throw DimensionError("roc envelope: pi grid and bounds differ in length");
  }
  if (!std_errors.empty() && std_errors.size() != pis.size()) {
    throw DimensionError("roc envelope: standard errors differ in length");
  }
  EnvelopeValue best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k < pis.size(); ++k) {
    const double pi = pis[k];
    const double bound = bounds[k];
    if (!(pi > 0.0 && pi < 1.0)) throw InvalidArgument("roc envelope: pi outside (0, 1)");
    if (bound < -kBoundSlack || bound > std::min(pi, 1.0 - pi) + kBoundSlack) {
      throw InvalidArgument("roc envelope: bound outside [0, min(pi, 1 - pi)]");
    }
    const double tpr = 1.0 - (bound - (1.0 - pi) * fpr) / pi;
    if (tpr < best.tpr_upper) {
      best.tpr_upper = tpr;
      best.std_error = std_errors.empty() ? 0.0 : std_errors[k] / pi;
    }
  }
  best.tpr_upper = std::clamp(best.tpr_upper, fpr, 1.0);
  return best;
}

std::vector<RocPoint> roc_upper_envelope(std::span<const double> pis,
                                         std::span<const double> bounds,
                                         std::span<const double> fpr_grid) {
  std::vector<RocPoint> out;
  out.reserve(fpr_grid.size());
  for (double x : fpr_grid) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("roc envelope: fpr outside [0, 1]");
    out.push_back(RocPoint{x, envelope_at(x, pis, bounds).tpr_upper});
  }
  return out;
}

std::vector<double> unit_grid(std::size_t count) {
  if (count < 2) throw InvalidArgument("unit grid: at least two points required");
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return grid;
}

}  // namespace netinf
