#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "netinf/linalg.hpp"
#include "netinf/model.hpp"
#include "netinf/rng.hpp"
#include "netinf/roc.hpp"

namespace netinf {

/// Edge-level weights turning per-pair miss / false-alarm probabilities into
/// the network-level ratios. Each matrix sums to 1.
struct EdgeWeights {
  Matrix w_minus;
  Matrix w_plus;
};

/// w_minus proportional to P{edge}, w_plus proportional to P{no edge}.
/// Throws DegeneratePriorError if either normalizer is zero.
EdgeWeights edge_weights(const Matrix& edge_probs);

/// 1/2 sum_ij (1 - sqrt(1 - 4 pi (1 - pi) rho_ij^2)) min(w-_ij, w+_ij).
/// Pairs with zero min-weight contribute nothing whatever their rho.
double direct_network_bound(const Matrix& rhos, const EdgeWeights& weights, double pi);

/// Monte Carlo estimate with the standard error of the mean.
struct BoundEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Strictly increasing grid of prior weights inside (0, 1).
class PiGrid {
 public:
  explicit PiGrid(std::vector<double> values);

  /// `count` equally spaced points from lo to hi inclusive.
  static PiGrid uniform(double lo, double hi, std::size_t count);
  /// 21 points on [0.025, 0.975].
  static PiGrid standard() { return uniform(0.025, 0.975, 21); }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// The two adjacencies compared for one ordered pair (i, j): chi_ij forced
/// to 0 and to 1, everything else (signs, other support entries) shared.
struct ConditionedPair {
  Matrix without_edge;
  Matrix with_edge;
};

using PairSampler = std::function<ConditionedPair(Rng&)>;

/// Draws a full signed support and a uniform ordered pair (i, j), then
/// rescales each conditioned signed graph independently.
PairSampler dynamic_er_pair_sampler(const ModelParams& params);

/// Always returns the same two adjacencies.
PairSampler fixed_pair_sampler(Matrix without_edge, Matrix with_edge);

/// BC between the zero-mean observation laws under the two adjacencies.
double conditioned_pair_rho(const ConditionedPair& pair, const ModelParams& params);

/// Per-trial coefficients; trial k uses derive_stream(seed, "side-info", {k}).
std::vector<double> side_info_rhos(const PairSampler& sampler, const ModelParams& params,
                                   std::size_t trials, std::uint64_t seed, unsigned threads = 1);

/// 1/2 (1 - mean_k sqrt(1 - 4 pi (1 - pi) rho_k^2)) with its standard error.
BoundEstimate side_info_bound_from_rhos(std::span<const double> rhos, double pi);

/// The side-information bound under the dynamic ER prior at a single pi.
/// Requires trials >= 2. Uses one seed drawn from `rng`.
BoundEstimate prop4_bound(const ModelParams& params, double pi, std::size_t trials, Rng& rng);

/// The bound over a pi grid, sharing one set of trials across all pi.
std::vector<BoundEstimate> side_info_bound_curve(const PairSampler& sampler,
                                                 const ModelParams& params, const PiGrid& grid,
                                                 std::size_t trials, std::uint64_t seed,
                                                 unsigned threads = 1);

/// Maximum TPR compatible with pi eps- + (1 - pi) eps+ >= L(pi) over the
/// grid, clamped to [fpr, 1]. `bounds[k]` is L at `pis[k]`.
std::vector<RocPoint> roc_upper_envelope(std::span<const double> pis,
                                         std::span<const double> bounds,
                                         std::span<const double> fpr_grid);

struct EnvelopeValue {
  double tpr_upper = 1.0;
  /// Standard error propagated from the bound at the minimizing pi.
  double std_error = 0.0;
};

/// Envelope at one FPR, with standard error when `std_errors` is non-empty.
EnvelopeValue envelope_at(double fpr, std::span<const double> pis, std::span<const double> bounds,
                          std::span<const double> std_errors = {});

/// `count` equally spaced points on [0, 1].
std::vector<double> unit_grid(std::size_t count);

}  // namespace netinf
