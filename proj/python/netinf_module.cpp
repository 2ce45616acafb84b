#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netinf/bht.hpp"
#include "netinf/errors.hpp"
#include "netinf/linalg.hpp"
#include "netinf/metrics.hpp"
#include "netinf/model.hpp"
#include "netinf/net_bounds.hpp"
#include "netinf/recovery.hpp"
#include "netinf/rng.hpp"

namespace py = pybind11;
using namespace netinf;

namespace {

DiscreteDistribution as_distribution(const std::vector<double>& probs) {
  return DiscreteDistribution(probs);
}

DiscreteMixture as_mixture(const std::vector<double>& weights,
                           const std::vector<std::pair<std::vector<double>, std::vector<double>>>& comps) {
  DiscreteMixture mix;
  mix.weights = weights;
  for (const auto& [f, g] : comps) mix.components.emplace_back(as_distribution(f), as_distribution(g));
  return mix;
}

std::vector<RocPoint> as_points(const std::vector<RocSweepPoint>& sweep) {
  std::vector<RocPoint> out;
  for (const auto& p : sweep) out.push_back(p.point);
  return out;
}

}  // namespace

PYBIND11_MODULE(netinf, m) {
  m.doc() = "Converse bounds and recovery benchmarks for linear Gaussian network inference";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<StabilityError>(m, "StabilityError", base.ptr());
  py::register_exception<NotPositiveDefiniteError>(m, "NotPositiveDefiniteError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<DegeneratePriorError>(m, "DegeneratePriorError", base.ptr());
  py::register_exception<DegenerateBatchError>(m, "DegenerateBatchError", base.ptr());

  py::class_<Rng>(m, "Rng", "Seeded random stream; see derive_stream.")
      .def(py::init([](std::uint64_t seed, const std::string& purpose,
                       const std::vector<std::uint64_t>& indices) {
             return derive_stream(seed, purpose, indices);
           }),
           py::arg("seed"), py::arg("purpose") = "python", py::arg("indices") = std::vector<std::uint64_t>{})
      .def("next_u64", [](Rng& rng) { return rng(); });

  // Linear algebra.
  m.def("spectral_radius", &spectral_radius, py::arg("a"));
  m.def("solve_discrete_lyapunov", &solve_discrete_lyapunov, py::arg("a"), py::arg("c"));
  m.def("logdet_pd", &logdet_pd, py::arg("m"));
  m.def(
      "gaussian_bc",
      [](const Vector& mean_p, const Matrix& cov_p, const Vector& mean_q, const Matrix& cov_q) {
        return gaussian_bc({mean_p, cov_p}, {mean_q, cov_q});
      },
      py::arg("mean_p"), py::arg("cov_p"), py::arg("mean_q"), py::arg("cov_q"));

  // Model.
  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](std::size_t n, std::size_t horizon, double sigma2, double nu2, double p,
                       double r0) {
             ModelParams params{n, horizon, sigma2, nu2, p, r0};
             params.validate();
             return params;
           }),
           py::arg("n") = 10, py::arg("T") = 20, py::arg("sigma2") = 1.0, py::arg("nu2") = 0.0,
           py::arg("p") = 0.2, py::arg("r0") = 0.8)
      .def_readwrite("n", &ModelParams::n)
      .def_readwrite("T", &ModelParams::horizon)
      .def_readwrite("sigma2", &ModelParams::sigma2)
      .def_readwrite("nu2", &ModelParams::nu2)
      .def_readwrite("p", &ModelParams::p)
      .def_readwrite("r0", &ModelParams::r0);

  m.def("scale_to_radius", &scale_to_radius, py::arg("a"), py::arg("r0"));
  m.def("is_nilpotent_integer", &is_nilpotent_integer, py::arg("a"));
  m.def(
      "sample_dynamic_er",
      [](const ModelParams& params, Rng& rng) {
        auto [draw, adjacency] = sample_dynamic_er(params, rng);
        return py::make_tuple(Eigen::MatrixXi(draw.signs), Eigen::MatrixXi(draw.support),
                              adjacency.weights);
      },
      py::arg("params"), py::arg("rng"),
      "Returns (signs, support, adjacency).");
  m.def(
      "simulate_trajectory",
      [](const Matrix& a, const ModelParams& params, Rng& rng) {
        return simulate_trajectory(AdjacencyMatrix{a}, params, rng).samples;
      },
      py::arg("a"), py::arg("params"), py::arg("rng"));
  m.def(
      "observation_covariance",
      [](const Matrix& a, const ModelParams& params) {
        return observation_covariance(AdjacencyMatrix{a}, params);
      },
      py::arg("a"), py::arg("params"));
  m.def("zero_start_covariance", &zero_start_covariance, py::arg("a"), py::arg("sigma2"),
        py::arg("T"));

  // Hypothesis-testing bounds.
  m.def(
      "bhattacharyya",
      [](const std::vector<double>& f, const std::vector<double>& g) {
        return bhattacharyya(as_distribution(f), as_distribution(g));
      },
      py::arg("f"), py::arg("g"));
  m.def(
      "exact_pe",
      [](const std::vector<double>& f, const std::vector<double>& g, double pi) {
        return exact_pe(as_distribution(f), as_distribution(g), pi);
      },
      py::arg("f"), py::arg("g"), py::arg("pi"));
  m.def("lb_direct", &lb_direct, py::arg("rho"), py::arg("pi"));
  m.def("lb_weak", &lb_weak, py::arg("rho"), py::arg("pi"));
  m.def("ub_pe", &ub_pe, py::arg("rho"), py::arg("pi"));
  m.def(
      "lb_side_info",
      [](const std::vector<double>& weights, const std::vector<double>& rhos, double pi) {
        return lb_side_info(std::span<const double>(weights), std::span<const double>(rhos), pi);
      },
      py::arg("weights"), py::arg("rhos"), py::arg("pi"));
  m.def(
      "lb_side_info_mixture",
      [](const std::vector<double>& weights,
         const std::vector<std::pair<std::vector<double>, std::vector<double>>>& components,
         double pi) { return lb_side_info(as_mixture(weights, components), pi); },
      py::arg("weights"), py::arg("components"), py::arg("pi"),
      "Side-information bound from (f_s, g_s) probability-vector pairs.");
  m.def(
      "example1_rho",
      [](double a, double noise_ratio, std::size_t horizon) {
        return example1_rho({a, noise_ratio, horizon, 0.5});
      },
      py::arg("a"), py::arg("N"), py::arg("T"));
  m.def(
      "dirichlet_experiment",
      [](std::size_t dim, std::size_t trials, std::uint64_t seed, unsigned threads) {
        std::vector<std::tuple<std::size_t, double, double, double>> out;
        for (const auto& t : dirichlet_experiment(dim, trials, seed, threads)) {
          out.emplace_back(t.trial, t.lb_direct, t.lb_side_info, t.exact_pe);
        }
        return out;
      },
      py::arg("dim"), py::arg("trials"), py::arg("seed"), py::arg("threads") = 1,
      "List of (trial, lb_direct, lb_side_info, exact_pe), sorted by lb_direct.");

  // Network-level bounds.
  m.def(
      "edge_weights",
      [](const Matrix& probs) {
        const EdgeWeights w = edge_weights(probs);
        return py::make_tuple(w.w_minus, w.w_plus);
      },
      py::arg("edge_probs"), "Returns (w_minus, w_plus).");
  m.def(
      "direct_network_bound",
      [](const Matrix& rhos, const Matrix& w_minus, const Matrix& w_plus, double pi) {
        return direct_network_bound(rhos, EdgeWeights{w_minus, w_plus}, pi);
      },
      py::arg("rhos"), py::arg("w_minus"), py::arg("w_plus"), py::arg("pi"));
  m.def(
      "side_info_bound_curve",
      [](const ModelParams& params, const std::vector<double>& pis, std::size_t trials,
         std::uint64_t seed, unsigned threads) {
        std::vector<std::pair<double, double>> out;
        for (const auto& e : side_info_bound_curve(dynamic_er_pair_sampler(params), params,
                                                   PiGrid(pis), trials, seed, threads)) {
          out.emplace_back(e.value, e.std_error);
        }
        return out;
      },
      py::arg("params"), py::arg("pis"), py::arg("trials"), py::arg("seed"),
      py::arg("threads") = 1, "List of (bound, stderr) under the dynamic ER prior.");
  m.def(
      "roc_upper_envelope",
      [](const std::vector<double>& pis, const std::vector<double>& bounds,
         const std::vector<double>& fpr) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : roc_upper_envelope(pis, bounds, fpr)) out.emplace_back(p.fpr, p.tpr);
        return out;
      },
      py::arg("pis"), py::arg("bounds"), py::arg("fpr_grid"));

  // Recovery.
  m.def(
      "lasso_support",
      [](const Matrix& samples, double lambda) {
        LassoConfig cfg;
        cfg.lambda = lambda;
        return Eigen::MatrixXi(lasso_support(ObservationSeries{samples}, cfg));
      },
      py::arg("samples"), py::arg("lam"));
  m.def(
      "ocse_support",
      [](const Matrix& samples, double theta, std::size_t num_perms, Rng& rng) {
        OcseConfig cfg;
        cfg.theta = theta;
        cfg.num_perms = num_perms;
        return Eigen::MatrixXi(ocse_support(ObservationSeries{samples}, cfg, rng));
      },
      py::arg("samples"), py::arg("theta"), py::arg("num_perms") = 100, py::arg("rng"));

  // Metrics.
  m.def(
      "error_ratios",
      [](const std::vector<Eigen::MatrixXi>& truths, const std::vector<Eigen::MatrixXi>& estimates) {
        const std::vector<SupportMatrix> t(truths.begin(), truths.end());
        const std::vector<SupportMatrix> e(estimates.begin(), estimates.end());
        const ErrorRatios r = error_ratios(t, e);
        return py::make_tuple(r.eps_minus, r.eps_plus);
      },
      py::arg("truths"), py::arg("estimates"), "Returns (eps_minus, eps_plus).");
  m.def(
      "roc_sweep",
      [](const std::string& algorithm, const std::vector<double>& grid, const ModelParams& params,
         std::size_t sims, std::uint64_t seed, unsigned threads, std::size_t num_perms) {
        Algorithm alg;
        if (algorithm == "lasso") {
          alg = Algorithm::lasso;
        } else if (algorithm == "ocse") {
          alg = Algorithm::ocse;
        } else {
          throw InvalidArgument("roc_sweep: algorithm must be 'lasso' or 'ocse'");
        }
        RocSweepOptions options{sims, seed, threads, num_perms};
        std::vector<std::pair<double, double>> out;
        for (const auto& p : as_points(roc_sweep(alg, grid, params, options))) {
          out.emplace_back(p.fpr, p.tpr);
        }
        return out;
      },
      py::arg("algorithm"), py::arg("grid"), py::arg("params"), py::arg("sims"), py::arg("seed"),
      py::arg("threads") = 1, py::arg("num_perms") = 100, "List of (fpr, tpr).");
  m.def("auc_bound_simple", &auc_bound_simple, py::arg("rho"));
  m.def("auc_bound_shapiro", &auc_bound_shapiro, py::arg("rho"));
  m.def(
      "auc_bound_numerical",
      [](double rho, const std::vector<double>& fpr, const std::vector<double>& pis) {
        return auc_bound_numerical(rho, fpr, pis);
      },
      py::arg("rho"), py::arg("fpr_grid"), py::arg("pi_grid"));
  m.def("mip", &mip, py::arg("q"), py::arg("supports"));
  m.def("column_supports", &column_supports, py::arg("a"));
  m.def(
      "mip_curve",
      [](const ModelParams& params, const std::vector<std::size_t>& horizons, std::size_t draws,
         std::uint64_t seed, unsigned threads) {
        std::vector<std::tuple<std::size_t, double, double>> out;
        for (const auto& p : mip_curve(params, horizons, draws, seed, threads)) {
          out.emplace_back(p.horizon, p.mean, p.std_error);
        }
        return out;
      },
      py::arg("params"), py::arg("horizons"), py::arg("draws"), py::arg("seed"),
      py::arg("threads") = 1, "List of (T, mean_mip, stderr).");
}
