#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "netinf/linalg.hpp"
#include "netinf/model.hpp"
#include "netinf/rng.hpp"

namespace netinf {

/// Lagged regression design: `lagged` holds rows Y(0)..Y(T-1) and `current`
/// rows Y(1)..Y(T).
struct DesignPair {
  Matrix lagged;
  Matrix current;

  static DesignPair from(const ObservationSeries& series);
  std::size_t rows() const { return static_cast<std::size_t>(lagged.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(lagged.cols()); }
};

struct LassoConfig {
  double lambda = 0.0;
  double tol = 1e-8;
  std::size_t max_iters = 10000;
  /// Coefficients with magnitude at or below this are reported as zero.
  double zero_threshold = 1e-10;

  void validate() const;
};

struct LassoResult {
  Vector coefficients;
  std::size_t sweeps = 0;
  /// False when max_iters sweeps ran without the change dropping below tol.
  bool converged = false;
};

/// (1/2T) ||current_j - lagged b||^2 + lambda ||b||_1.
double lasso_objective(const DesignPair& design, std::size_t column, const Vector& coefficients,
                       double lambda);

/// Cyclic coordinate descent with soft-thresholding for target column j.
LassoResult lasso_column(const DesignPair& design, std::size_t column, const LassoConfig& cfg);

/// Support of the column-wise lasso estimate.
SupportMatrix lasso_support(const ObservationSeries& series, const LassoConfig& cfg);

struct OcseConfig {
  double theta = 0.05;
  std::size_t num_perms = 100;
  /// Defaults to the number of vertices.
  std::optional<std::size_t> max_parents;

  void validate() const;
};

struct OcseResult {
  std::vector<std::size_t> parents;
  /// Skipped rank-deficient candidates and the reason discovery stopped.
  std::vector<std::string> diagnostics;
};

/// Greedy forward parent discovery for target column j.
///
/// Each step picks the column of `lagged` that, added to the chosen set,
/// gives the smallest residual sum of squares (ties to the lowest index).
/// The candidate is kept only if its RSS improvement strictly exceeds the
/// empirical (1 - theta)-quantile of the improvements obtained with its rows
/// shuffled num_perms times; the quantile is the ceil((1 - theta) M)-th
/// smallest of the M permuted values.
OcseResult ocse_parents(const DesignPair& design, std::size_t column, const OcseConfig& cfg,
                        Rng& rng);

/// Column-wise oCSE. Column j uses derive_stream(base, "ocse-column", {j}),
/// where base is one draw from `rng`.
SupportMatrix ocse_support(const ObservationSeries& series, const OcseConfig& cfg, Rng& rng);

}  // namespace netinf
