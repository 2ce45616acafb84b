#include "netinf/bht.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "netinf/errors.hpp"
#include "netinf/parallel.hpp"

namespace netinf {
namespace {

constexpr double kSumTolerance = 1e-12;
constexpr double kRadicalOvershoot = 1e-12;

void require_same_length(const DiscreteDistribution& f, const DiscreteDistribution& g,
                         const char* what) {
  if (f.size() != g.size()) {
    throw DimensionError(std::string(what) + ": distributions have different lengths");
  }
}

void require_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
  }
}

// Coefficients from floating-point routines may exceed 1 by rounding.
void require_coefficient(double rho, const char* what) {
  if (!(rho >= 0.0 && rho <= 1.0 + kRadicalOvershoot)) {
    throw InvalidArgument(std::string(what) + ": coefficient outside [0, 1]");
  }
}

// sqrt(1 - u), clamping u to 1 for an overshoot up to 1e-12.
double sqrt_one_minus(double u) {
  if (u > 1.0) {
    if (u - 1.0 > kRadicalOvershoot) {
      throw NumericalError("bound radical: 1 - u is negative (u = " + std::to_string(u) + ")");
    }
    return 0.0;
  }
  return std::sqrt(1.0 - u);
}

void validate_weights(const std::vector<double>& weights, std::size_t count) {
  if (weights.empty()) throw InvalidArgument("mixture: at least one component required");
  if (weights.size() != count) {
    throw InvalidArgument("mixture: weight count does not match component count");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("mixture: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InvalidArgument("mixture: weights do not sum to 1");
  }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidArgument("distribution: empty probability vector");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("distribution: negative or non-finite probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InvalidArgument("distribution: probabilities sum to " + std::to_string(sum));
  }
}

double bhattacharyya(const DiscreteDistribution& f, const DiscreteDistribution& g) {
  require_same_length(f, g, "bhattacharyya");
  double rho = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) rho += std::sqrt(f[i] * g[i]);
  return rho;
}

double exact_pe(const DiscreteDistribution& f, const DiscreteDistribution& g, double pi) {
  require_same_length(f, g, "exact_pe");
  require_probability(pi, "exact_pe: pi");
  double pe = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) pe += std::min(pi * f[i], (1.0 - pi) * g[i]);
  return pe;
}

double lb_direct(double rho, double pi) {
  require_probability(pi, "lb_direct: pi");
  require_coefficient(rho, "lb_direct");
  return 0.5 * (1.0 - sqrt_one_minus(4.0 * pi * (1.0 - pi) * rho * rho));
}

double lb_weak(double rho, double pi) {
  require_probability(pi, "lb_weak: pi");
  require_coefficient(rho, "lb_weak");
  return pi * (1.0 - pi) * rho * rho;
}

double ub_pe(double rho, double pi) {
  require_probability(pi, "ub_pe: pi");
  require_coefficient(rho, "ub_pe");
  return std::sqrt(pi * (1.0 - pi)) * rho;
}

double lb_side_info(std::span<const double> weights, std::span<const double> rhos, double pi) {
  require_probability(pi, "lb_side_info: pi");
  if (weights.size() != rhos.size()) {
    throw DimensionError("lb_side_info: weights and coefficients differ in length");
  }
  validate_weights(std::vector<double>(weights.begin(), weights.end()), rhos.size());
  for (double rho : rhos) require_coefficient(rho, "lb_side_info");
  const double scale = 4.0 * pi * (1.0 - pi);
  double sum = 0.0;
  for (std::size_t s = 0; s < rhos.size(); ++s) {
    sum += weights[s] * sqrt_one_minus(scale * rhos[s] * rhos[s]);
  }
  return 0.5 * (1.0 - sum);
}

void validate_mixture(const DiscreteMixture& mix) {
  validate_weights(mix.weights, mix.components.size());
  const std::size_t dim = mix.components.front().first.size();
  for (const auto& [f, g] : mix.components) {
    if (f.size() != dim || g.size() != dim) {
      throw InvalidArgument("mixture: components differ in dimension");
    }
  }
}

void validate_mixture(const GaussianMixture& mix) {
  validate_weights(mix.weights, mix.components.size());
  const auto dim = mix.components.front().first.mean.size();
  for (const auto& [f, g] : mix.components) {
    if (f.mean.size() != dim || g.mean.size() != dim) {
      throw InvalidArgument("mixture: components differ in dimension");
    }
  }
}

std::vector<double> component_rhos(const DiscreteMixture& mix) {
  validate_mixture(mix);
  std::vector<double> rhos;
  rhos.reserve(mix.components.size());
  for (const auto& [f, g] : mix.components) rhos.push_back(bhattacharyya(f, g));
  return rhos;
}

std::vector<double> component_rhos(const GaussianMixture& mix) {
  validate_mixture(mix);
  std::vector<double> rhos;
  rhos.reserve(mix.components.size());
  for (const auto& [f, g] : mix.components) rhos.push_back(gaussian_bc(f, g));
  return rhos;
}

double lb_side_info(const DiscreteMixture& mix, double pi) {
  return lb_side_info(mix.weights, component_rhos(mix), pi);
}

double lb_side_info(const GaussianMixture& mix, double pi) {
  return lb_side_info(mix.weights, component_rhos(mix), pi);
}

std::pair<DiscreteDistribution, DiscreteDistribution> mixed(const DiscreteMixture& mix) {
  validate_mixture(mix);
  const std::size_t dim = mix.components.front().first.size();
  std::vector<double> f(dim, 0.0);
  std::vector<double> g(dim, 0.0);
  for (std::size_t s = 0; s < mix.components.size(); ++s) {
    const auto& [fs, gs] = mix.components[s];
    for (std::size_t i = 0; i < dim; ++i) {
      f[i] += mix.weights[s] * fs[i];
      g[i] += mix.weights[s] * gs[i];
    }
  }
  return {DiscreteDistribution(std::move(f)), DiscreteDistribution(std::move(g))};
}

DiscreteMixture example2_mixture() {
  DiscreteMixture mix;
  mix.weights = {2.0 / 3.0, 1.0 / 3.0};
  mix.components.emplace_back(DiscreteDistribution({0.5, 0.0, 0.5}),
                              DiscreteDistribution({0.75, 0.0, 0.25}));
  mix.components.emplace_back(DiscreteDistribution({0.0, 1.0, 0.0}),
                              DiscreteDistribution({0.0, 1.0, 0.0}));
  return mix;
}

double lb_direct_rho_variant(double rho, double pi) {
  require_probability(pi, "lb_direct_rho_variant: pi");
  require_coefficient(rho, "lb_direct_rho_variant");
  return 0.5 * (1.0 - sqrt_one_minus(4.0 * pi * (1.0 - pi) * rho));
}

double lb_side_info_rho_variant(std::span<const double> weights, std::span<const double> rhos,
                                double pi) {
  require_probability(pi, "lb_side_info_rho_variant: pi");
  if (weights.size() != rhos.size()) {
    throw DimensionError("lb_side_info_rho_variant: length mismatch");
  }
  for (double rho : rhos) require_coefficient(rho, "lb_side_info_rho_variant");
  const double scale = 4.0 * pi * (1.0 - pi);
  double sum = 0.0;
  for (std::size_t s = 0; s < rhos.size(); ++s) sum += weights[s] * sqrt_one_minus(scale * rhos[s]);
  return 0.5 * (1.0 - sum);
}

void Example1Params::validate() const {
  if (a == 0.0 || !std::isfinite(a)) throw InvalidArgument("example1: a must be nonzero");
  if (!(noise_ratio >= 0.0)) throw InvalidArgument("example1: noise ratio must be >= 0");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("example1: beta must be in (0, 1)");
}

double example1_rho0(double a, double noise_ratio) {
  const double a2 = a * a;
  const double m = noise_ratio + 1.0;
  return std::sqrt(std::sqrt(m * (m + a2)) / (m + a2 / 2.0));
}

double example1_gamma(double a, double noise_ratio) {
  const double a2 = a * a;
  const double n = noise_ratio;
  const double num = (n + 1.0) * std::sqrt(n * n + (2.0 + a2) * n + 1.0);
  const double den = n * n + (2.0 + a2 / 2.0) * n + 1.0 + a2 / 4.0;
  return std::sqrt(num / den);
}

double example1_rho(const Example1Params& params) {
  params.validate();
  return example1_rho0(params.a, params.noise_ratio) *
         std::pow(example1_gamma(params.a, params.noise_ratio),
                  static_cast<double>(params.horizon));
}

DiscreteDistribution sample_dirichlet(std::size_t dim, Rng& rng) {
  if (dim < 1) throw InvalidArgument("sample_dirichlet: dimension must be >= 1");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> draws(dim);
  double total = 0.0;
  for (double& x : draws) {
    x = expo(rng);
    total += x;
  }
  for (double& x : draws) x /= total;
  return DiscreteDistribution(std::move(draws));
}

std::vector<DirichletTrial> dirichlet_experiment(std::size_t dim, std::size_t trials,
                                                 std::uint64_t seed, unsigned threads) {
  if (dim < 2) throw InvalidArgument("dirichlet_experiment: dimension must be >= 2");
  if (trials < 1) throw InvalidArgument("dirichlet_experiment: trials must be >= 1");
  constexpr double kPi = 0.5;
  std::vector<DirichletTrial> out(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    Rng rng = derive_stream(seed, "dirichlet", {k});
    const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    DiscreteDistribution f1 = sample_dirichlet(dim, rng);
    DiscreteDistribution f2 = sample_dirichlet(dim, rng);
    DiscreteDistribution g1 = sample_dirichlet(dim, rng);
    DiscreteDistribution g2 = sample_dirichlet(dim, rng);
    DiscreteMixture mix;
    mix.weights = {alpha, 1.0 - alpha};
    mix.components.emplace_back(std::move(f1), std::move(g1));
    mix.components.emplace_back(std::move(f2), std::move(g2));
    const auto [f, g] = mixed(mix);
    out[k] = DirichletTrial{k, lb_direct(bhattacharyya(f, g), kPi), lb_side_info(mix, kPi),
                            exact_pe(f, g, kPi)};
  });
  std::sort(out.begin(), out.end(), [](const DirichletTrial& x, const DirichletTrial& y) {
    return x.lb_direct != y.lb_direct ? x.lb_direct < y.lb_direct : x.trial < y.trial;
  });
  return out;
}

}  // namespace netinf
