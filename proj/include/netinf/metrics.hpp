#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "netinf/linalg.hpp"
#include "netinf/model.hpp"
#include "netinf/net_bounds.hpp"
#include "netinf/roc.hpp"

namespace netinf {

struct ConfusionCounts {
  std::size_t missed_edges = 0;
  std::size_t true_edges = 0;
  std::size_t false_edges = 0;
  std::size_t true_nonedges = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& other);
};

/// Counts over all ordered pairs, self-pairs included.
ConfusionCounts confusion(const SupportMatrix& truth, const SupportMatrix& estimate);

struct ErrorRatios {
  double eps_minus = 0.0;
  double eps_plus = 0.0;
};

/// Ratio-of-sums false negative and false positive ratios over a batch.
/// Throws DegenerateBatchError if the batch holds no edges or no non-edges.
ErrorRatios error_ratios(std::span<const SupportMatrix> truths,
                         std::span<const SupportMatrix> estimates);
ErrorRatios error_ratios(const ConfusionCounts& totals);

enum class Algorithm { lasso, ocse };

std::string_view algorithm_name(Algorithm algorithm);

struct RocSweepPoint {
  double param = 0.0;
  RocPoint point;
  /// Standard errors of the ratio estimators across simulations.
  double fpr_std_error = 0.0;
  double tpr_std_error = 0.0;
};

struct RocSweepOptions {
  std::size_t sims = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// oCSE permutation count.
  std::size_t num_perms = 100;
};

/// ROC points of one algorithm over a grid of lambda (lasso) or theta (oCSE)
/// values. Simulation s draws its network and trajectory from
/// derive_stream(seed, "roc-sim", {s}); oCSE permutations for simulation s
/// come from derive_stream(seed, "roc-ocse", {s}). Both are shared by every
/// grid value.
std::vector<RocSweepPoint> roc_sweep(Algorithm algorithm, std::span<const double> grid,
                                     const ModelParams& params, const RocSweepOptions& options);

/// AUC <= 1 - rho^4 / 6.
double auc_bound_simple(double rho);
/// AUC <= 1 - (1 - sqrt(1 - rho^2))^2 / 2.
double auc_bound_shapiro(double rho);
/// Trapezoidal area under the ROC envelope built from lb_direct(rho, pi).
double auc_bound_numerical(double rho, std::span<const double> fpr_grid,
                           std::span<const double> pi_grid);

/// max_j max_{i not in A_j} || Q_{i,A_j} Q_{A_j,A_j}^{-1} ||_1. Columns
/// with empty A_j contribute 0.
double mip(const Matrix& q, const std::vector<std::vector<std::size_t>>& supports);

/// Row indices of the nonzero entries of each column.
std::vector<std::vector<std::size_t>> column_supports(const Matrix& a);

struct MipPoint {
  std::size_t horizon = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Average MIP of zero-start covariances over `draws` dynamic ER networks.
/// Draw d uses derive_stream(seed, "mip", {d}).
std::vector<MipPoint> mip_curve(const ModelParams& params, std::span<const std::size_t> horizons,
                                std::size_t draws, std::uint64_t seed, unsigned threads = 1);

/// How a set of algorithm ROC points sits against a bound envelope.
struct DominanceReport {
  std::size_t points = 0;
  /// Points above the envelope by more than `tolerance_se` combined
  /// standard errors.
  std::size_t violations = 0;
  /// Largest (tpr - envelope) / combined standard error over all points;
  /// negative when every point lies below the envelope.
  double worst_excess = -std::numeric_limits<double>::infinity();
  /// Largest envelope - tpr among points with fpr <= low_fpr (0 if none).
  double low_fpr_gap = 0.0;
};

/// Compares ROC points to the envelope of a bound curve, evaluating the
/// envelope exactly at each point's FPR. The combined standard error is
/// sqrt(se_envelope^2 + se_tpr^2).
DominanceReport envelope_dominance(std::span<const RocSweepPoint> points,
                                   std::span<const double> pis,
                                   std::span<const BoundEstimate> bounds, double tolerance_se = 2.0,
                                   double low_fpr = 0.1);

}  // namespace netinf
