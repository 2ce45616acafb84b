#include "netinf/recovery.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "netinf/errors.hpp"

namespace netinf {
namespace {

double soft_threshold(double x, double level) {
  if (x > level) return x - level;
  if (x < -level) return x + level;
  return 0.0;
}

void require_column(const DesignPair& design, std::size_t column) {
  if (column >= design.size()) throw DimensionError("recovery: target column out of range");
}

// Residual sum of squares of regressing y on the given columns; nullopt when
// the columns are linearly dependent.
std::optional<double> regression_rss(const Matrix& columns, const Vector& y) {
  if (columns.cols() == 0) return y.squaredNorm();
  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  if (qr.rank() < columns.cols()) return std::nullopt;
  const Vector beta = qr.solve(y);
  return (y - columns * beta).squaredNorm();
}

Matrix gather(const Matrix& source, const std::vector<std::size_t>& chosen, std::size_t extra) {
  Matrix out(source.rows(), static_cast<Eigen::Index>(chosen.size() + 1));
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = source.col(static_cast<Eigen::Index>(chosen[k]));
  }
  out.col(static_cast<Eigen::Index>(chosen.size())) = source.col(static_cast<Eigen::Index>(extra));
  return out;
}

}  // namespace

DesignPair DesignPair::from(const ObservationSeries& series) {
  const Eigen::Index steps = series.samples.rows();
  if (steps < 2) throw InvalidArgument("design: at least two time points required");
  if (!series.samples.allFinite()) throw InvalidArgument("design: non-finite observation");
  return DesignPair{series.samples.topRows(steps - 1), series.samples.bottomRows(steps - 1)};
}

void LassoConfig::validate() const {
  if (!(lambda >= 0.0)) throw InvalidArgument("lasso: lambda must be >= 0");
  if (!(tol > 0.0)) throw InvalidArgument("lasso: tol must be > 0");
  if (max_iters < 1) throw InvalidArgument("lasso: max_iters must be >= 1");
  if (!(zero_threshold >= 0.0)) throw InvalidArgument("lasso: zero_threshold must be >= 0");
}

double lasso_objective(const DesignPair& design, std::size_t column, const Vector& coefficients,
                       double lambda) {
  require_column(design, column);
  const auto rows = static_cast<double>(design.rows());
  const Vector residual =
      design.current.col(static_cast<Eigen::Index>(column)) - design.lagged * coefficients;
  return residual.squaredNorm() / (2.0 * rows) + lambda * coefficients.lpNorm<1>();
}

LassoResult lasso_column(const DesignPair& design, std::size_t column, const LassoConfig& cfg) {
  cfg.validate();
  require_column(design, column);
  const auto rows = static_cast<double>(design.rows());
  const Eigen::Index n = design.lagged.cols();
  const Matrix gram = design.lagged.transpose() * design.lagged / rows;
  const Vector target_corr =
      design.lagged.transpose() * design.current.col(static_cast<Eigen::Index>(column)) / rows;

  LassoResult result{Vector::Zero(n), 0, false};
  Vector& b = result.coefficients;
  Vector gram_b = Vector::Zero(n);
#ifndef NDEBUG
  double previous = lasso_objective(design, column, b, cfg.lambda);
#endif
  while (result.sweeps < cfg.max_iters) {
    ++result.sweeps;
    double max_change = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double curvature = gram(k, k);
      const double old = b(k);
      double updated = 0.0;
      if (curvature > 0.0) {
        const double partial = target_corr(k) - gram_b(k) + curvature * old;
        updated = soft_threshold(partial, cfg.lambda) / curvature;
      }
      if (updated != old) {
        gram_b += gram.col(k) * (updated - old);
        b(k) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
#ifndef NDEBUG
    const double current = lasso_objective(design, column, b, cfg.lambda);
    assert(current <= previous + 1e-12 * std::max(1.0, std::abs(previous)));
    previous = current;
#endif
    if (max_change < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

SupportMatrix lasso_support(const ObservationSeries& series, const LassoConfig& cfg) {
  const DesignPair design = DesignPair::from(series);
  const auto n = static_cast<Eigen::Index>(design.size());
  SupportMatrix support = SupportMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const LassoResult fit = lasso_column(design, static_cast<std::size_t>(j), cfg);
    for (Eigen::Index i = 0; i < n; ++i) {
      support(i, j) = std::abs(fit.coefficients(i)) > cfg.zero_threshold ? 1 : 0;
    }
  }
  return support;
}

void OcseConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("ocse: theta must be in (0, 1)");
  if (num_perms < 20) throw InvalidArgument("ocse: num_perms must be >= 20");
}

OcseResult ocse_parents(const DesignPair& design, std::size_t column, const OcseConfig& cfg,
                        Rng& rng) {
  cfg.validate();
  require_column(design, column);
  if (design.rows() < 2) throw InvalidArgument("ocse: at least two regression rows required");

  const std::size_t n = design.size();
  const std::size_t limit = std::min(n, cfg.max_parents.value_or(n));
  const Vector y = design.current.col(static_cast<Eigen::Index>(column));
  const auto quantile_rank = static_cast<std::size_t>(std::clamp<double>(
      std::ceil((1.0 - cfg.theta) * static_cast<double>(cfg.num_perms)), 1.0,
      static_cast<double>(cfg.num_perms)));

  OcseResult result;
  std::vector<bool> taken(n, false);
  double current_rss = y.squaredNorm();
  std::vector<double> permuted(cfg.num_perms);

  while (result.parents.size() < limit) {
    if (design.rows() < result.parents.size() + 2) {
      result.diagnostics.push_back("stopped: too few rows to fit another parent");
      break;
    }
    std::optional<std::size_t> best;
    double best_rss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (taken[k]) continue;
      const auto rss = regression_rss(gather(design.lagged, result.parents, k), y);
      if (!rss) {
        result.diagnostics.push_back("skipped rank-deficient candidate " + std::to_string(k));
        continue;
      }
      if (!best || *rss < best_rss) {
        best = k;
        best_rss = *rss;
      }
    }
    if (!best) break;

    const double improvement = current_rss - best_rss;
    Matrix trial = gather(design.lagged, result.parents, *best);
    const Eigen::Index last = trial.cols() - 1;
    std::vector<double> shuffled(design.lagged.rows());
    for (std::size_t m = 0; m < cfg.num_perms; ++m) {
      for (Eigen::Index r = 0; r < design.lagged.rows(); ++r) {
        shuffled[static_cast<std::size_t>(r)] =
            design.lagged(r, static_cast<Eigen::Index>(*best));
      }
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      trial.col(last) = Eigen::Map<const Vector>(shuffled.data(), trial.rows());
      const auto rss = regression_rss(trial, y);
      permuted[m] = rss ? current_rss - *rss : 0.0;
    }
    std::sort(permuted.begin(), permuted.end());
    const double threshold = permuted[quantile_rank - 1];
    if (!(improvement > threshold)) break;

    result.parents.push_back(*best);
    taken[*best] = true;
    current_rss = best_rss;
  }
  return result;
}

SupportMatrix ocse_support(const ObservationSeries& series, const OcseConfig& cfg, Rng& rng) {
  cfg.validate();
  const DesignPair design = DesignPair::from(series);
  const auto n = static_cast<Eigen::Index>(design.size());
  const std::uint64_t base = draw_seed(rng);
  SupportMatrix support = SupportMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Rng column_rng = derive_stream(base, "ocse-column", {static_cast<std::uint64_t>(j)});
    const OcseResult found = ocse_parents(design, static_cast<std::size_t>(j), cfg, column_rng);
    for (std::size_t parent : found.parents) support(static_cast<Eigen::Index>(parent), j) = 1;
  }
  return support;
}

}  // namespace netinf
