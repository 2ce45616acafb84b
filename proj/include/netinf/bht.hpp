#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "netinf/linalg.hpp"
#include "netinf/rng.hpp"

namespace netinf {

/// Finite probability vector; entries nonnegative, summing to 1 within 1e-12.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probs);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

/// Bhattacharyya coefficient sum_i sqrt(f_i g_i).
double bhattacharyya(const DiscreteDistribution& f, const DiscreteDistribution& g);

/// Minimum average error probability sum_i min(pi f_i, (1 - pi) g_i).
double exact_pe(const DiscreteDistribution& f, const DiscreteDistribution& g, double pi);

/// Lower bound 1/2 (1 - sqrt(1 - 4 pi (1 - pi) rho^2)) from the mixtures alone.
double lb_direct(double rho, double pi);
/// Weaker lower bound pi (1 - pi) rho^2.
double lb_weak(double rho, double pi);
/// Upper bound sqrt(pi (1 - pi)) rho on the minimum error probability.
double ub_pe(double rho, double pi);

/// Side-information bound 1/2 (1 - sum_s alpha_s sqrt(1 - 4 pi (1 - pi) rho_s^2))
/// from per-component coefficients.
double lb_side_info(std::span<const double> weights, std::span<const double> rhos, double pi);

/// Mixture decomposition f = sum_s alpha_s f_s, g = sum_s alpha_s g_s.
template <class Component>
struct MixturePair {
  std::vector<double> weights;
  std::vector<std::pair<Component, Component>> components;
};

using DiscreteMixture = MixturePair<DiscreteDistribution>;
using GaussianMixture = MixturePair<GaussianSpec>;

/// Checks weights (nonnegative, sum 1 within 1e-12), d >= 1, and equal
/// component dimensions. Throws InvalidArgument.
void validate_mixture(const DiscreteMixture& mix);
void validate_mixture(const GaussianMixture& mix);

/// Per-component coefficients rho(f_s, g_s).
std::vector<double> component_rhos(const DiscreteMixture& mix);
std::vector<double> component_rhos(const GaussianMixture& mix);

double lb_side_info(const DiscreteMixture& mix, double pi);
double lb_side_info(const GaussianMixture& mix, double pi);

/// The mixed distributions (f, g).
std::pair<DiscreteDistribution, DiscreteDistribution> mixed(const DiscreteMixture& mix);

/// The three-point mixture pair used as the non-concavity witness:
/// f = (1/3, 1/3, 1/3), g = (1/2, 1/3, 1/6), split with weights (2/3, 1/3).
DiscreteMixture example2_mixture();

// Variants with rho in place of rho^2 under the square root. These reproduce
// the previously published values 0.4246 / 0.4385 for example2_mixture();
// they are not valid bounds in general and are kept only for that check.
double lb_direct_rho_variant(double rho, double pi);
double lb_side_info_rho_variant(std::span<const double> weights, std::span<const double> rhos,
                                double pi);

/// Two-vertex network with either no edge (A0 = 0) or a single edge 1 -> 2
/// of coefficient a (A1), observed with noise ratio N = nu2 / sigma2.
struct Example1Params {
  double a = 1.0;
  double noise_ratio = 0.0;
  std::size_t horizon = 0;
  double beta = 0.5;

  void validate() const;
};

/// Closed-form factors of rho(A0, A1) = rho0 * gamma^T. No range checks,
/// so a = 0 may be substituted directly.
double example1_rho0(double a, double noise_ratio);
double example1_gamma(double a, double noise_ratio);
double example1_rho(const Example1Params& params);

/// Symmetric Dirichlet draw via normalized unit-rate exponentials.
DiscreteDistribution sample_dirichlet(std::size_t dim, Rng& rng);

struct DirichletTrial {
  std::size_t trial = 0;
  double lb_direct = 0.0;
  double lb_side_info = 0.0;
  double exact_pe = 0.0;
};

/// Random two-component mixtures at pi = 1/2: alpha_1 ~ U[0, 1], and
/// f_1, f_2, g_1, g_2 i.i.d. symmetric Dirichlet of dimension `dim`. Trial k
/// uses derive_stream(seed, "dirichlet", {k}). Result sorted ascending by
/// lb_direct (ties by trial index).
std::vector<DirichletTrial> dirichlet_experiment(std::size_t dim, std::size_t trials,
                                                 std::uint64_t seed, unsigned threads = 1);

}  // namespace netinf
