#include "netinf/runner.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "netinf/bht.hpp"
#include "netinf/errors.hpp"
#include "netinf/metrics.hpp"
#include "netinf/net_bounds.hpp"

#ifndef NETINF_VERSION
#define NETINF_VERSION "unknown"
#endif

namespace netinf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }

  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((append(values, first)), ...);
    text_ += '\n';
  }

  const std::string& text() const { return text_; }

 private:
  void append(double v, bool& first) { sep(first), text_ += format_double(v); }
  void append(std::size_t v, bool& first) { sep(first), text_ += std::to_string(v); }
  void sep(bool& first) {
    if (!first) text_ += ',';
    first = false;
  }

  std::string text_;
};

void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + temp.string());
    out << content;
    if (!out) throw Error("failed writing " + temp.string());
  }
  fs::rename(temp, path);
}

class OutputSet {
 public:
  explicit OutputSet(fs::path directory) : directory_(std::move(directory)) {
    fs::create_directories(directory_);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = directory_ / name;
    write_atomically(path, content);
    files_.push_back(path);
  }

  const fs::path& directory() const { return directory_; }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path directory_;
  std::vector<fs::path> files_;
};

json run_example1(const ExperimentConfig& cfg, OutputSet& out) {
  Csv csv({"a", "N", "T", "rho_closed_form", "rho_covariance_based"});
  double worst = 0.0;
  for (double a : cfg.example1_a) {
    for (double noise : cfg.example1_noise) {
      Matrix with_edge = Matrix::Zero(2, 2);
      with_edge(0, 1) = a;
      for (std::size_t t = 0; t <= cfg.example1_max_horizon; ++t) {
        const double closed = example1_rho({a, noise, t, cfg.example1_beta});
        ModelParams model;
        model.n = 2;
        model.horizon = t;
        model.sigma2 = 1.0;
        model.nu2 = noise;
        const double from_cov =
            conditioned_pair_rho(ConditionedPair{Matrix::Zero(2, 2), with_edge}, model);
        worst = std::max(worst, std::abs(from_cov - closed) / closed);
        csv.row(a, noise, t, closed, from_cov);
      }
    }
  }
  out.write("example1.csv", csv.text());
  return json{{"max_relative_error", worst}};
}

json run_example2() {
  const DiscreteMixture mix = example2_mixture();
  const auto [f, g] = mixed(mix);
  const double rho = bhattacharyya(f, g);
  const auto rhos = component_rhos(mix);
  constexpr double kPi = 0.5;
  return json{
      {"rho", rho},
      {"component_rhos", rhos},
      {"lb_direct", lb_direct(rho, kPi)},
      {"lb_side_info", lb_side_info(mix.weights, rhos, kPi)},
      {"exact_pe", exact_pe(f, g, kPi)},
      {"paper_variant_direct", lb_direct_rho_variant(rho, kPi)},
      {"paper_variant_side", lb_side_info_rho_variant(mix.weights, rhos, kPi)},
  };
}

json run_fig1(const ExperimentConfig& cfg, OutputSet& out) {
  const auto trials = dirichlet_experiment(cfg.dim, cfg.trials, *cfg.master_seed, cfg.threads);
  Csv csv({"trial", "lb_direct", "lb_side_info", "exact_pe"});
  std::size_t direct_better = 0;
  std::size_t violations = 0;
  for (const auto& t : trials) {
    csv.row(t.trial, t.lb_direct, t.lb_side_info, t.exact_pe);
    if (t.lb_direct > t.lb_side_info) ++direct_better;
    if (t.lb_direct > t.exact_pe + 1e-12 || t.lb_side_info > t.exact_pe + 1e-12) ++violations;
  }
  out.write("fig1.csv", csv.text());
  return json{{"trials", trials.size()},
              {"direct_better", direct_better},
              {"bound_violations", violations}};
}

struct BoundCurve {
  PiGrid grid;
  std::vector<BoundEstimate> estimates;
};

BoundCurve write_bound(const ExperimentConfig& cfg, OutputSet& out, const std::string& suffix) {
  PiGrid grid(cfg.pi_grid);
  const std::uint64_t seed = derive_stream(*cfg.master_seed, "bound-seed")();
  auto estimates = side_info_bound_curve(dynamic_er_pair_sampler(cfg.model), cfg.model, grid,
                                         cfg.trials, seed, cfg.threads);
  Csv bound_csv({"pi", "bound", "stderr"});
  std::vector<double> values;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    bound_csv.row(grid.values()[k], estimates[k].value, estimates[k].std_error);
    values.push_back(estimates[k].value);
  }
  Csv envelope_csv({"fpr", "tpr_upper"});
  for (const auto& p : roc_upper_envelope(grid.values(), values, cfg.fpr_grid)) {
    envelope_csv.row(p.fpr, p.tpr);
  }
  out.write("bound" + suffix + ".csv", bound_csv.text());
  out.write("envelope" + suffix + ".csv", envelope_csv.text());
  return BoundCurve{std::move(grid), std::move(estimates)};
}

json run_bound(const ExperimentConfig& cfg, OutputSet& out) {
  const BoundCurve curve = write_bound(cfg, out, "");
  double largest = 0.0;
  for (const auto& e : curve.estimates) largest = std::max(largest, e.value);
  return json{{"trials", cfg.trials}, {"max_bound", largest}};
}

json run_roc(const ExperimentConfig& cfg, OutputSet& out) {
  const BoundCurve curve = write_bound(cfg, out, "");
  RocSweepOptions options;
  options.sims = cfg.sims;
  options.seed = derive_stream(*cfg.master_seed, "roc-seed")();
  options.threads = cfg.threads;
  options.num_perms = cfg.num_perms;

  json summary{{"trials", cfg.trials}, {"sims", cfg.sims}};
  for (Algorithm algorithm : {Algorithm::lasso, Algorithm::ocse}) {
    const auto& grid = algorithm == Algorithm::lasso ? cfg.lambda_grid : cfg.theta_grid;
    const auto points = roc_sweep(algorithm, grid, cfg.model, options);
    Csv csv({"param", "fpr", "tpr"});
    for (const auto& p : points) csv.row(p.param, p.point.fpr, p.point.tpr);
    const std::string name(algorithm_name(algorithm));
    out.write("roc_" + name + ".csv", csv.text());
    const DominanceReport report = envelope_dominance(points, curve.grid.values(), curve.estimates);
    summary[name] = json{{"points", report.points},
                         {"violations_beyond_2se", report.violations},
                         {"worst_excess_se", report.worst_excess},
                         {"low_fpr_gap", report.low_fpr_gap}};
  }
  return summary;
}

json run_auc(const ExperimentConfig& cfg, OutputSet& out) {
  Csv csv({"rho", "simple", "shapiro", "numerical"});
  double worst_margin = std::numeric_limits<double>::infinity();
  for (double rho : cfg.rho_grid) {
    const double simple = auc_bound_simple(rho);
    const double shapiro = auc_bound_shapiro(rho);
    const double numerical = auc_bound_numerical(rho, cfg.fpr_grid, cfg.pi_grid);
    worst_margin = std::min(worst_margin, shapiro - numerical);
    csv.row(rho, simple, shapiro, numerical);
  }
  out.write("auc.csv", csv.text());
  return json{{"min_shapiro_minus_numerical", worst_margin}};
}

json run_mip(const ExperimentConfig& cfg, OutputSet& out) {
  const auto curve =
      mip_curve(cfg.model, cfg.horizon_grid, cfg.draws, *cfg.master_seed, cfg.threads);
  Csv csv({"T", "mean_mip", "stderr"});
  double largest = 0.0;
  for (const auto& p : curve) {
    csv.row(p.horizon, p.mean, p.std_error);
    largest = std::max(largest, p.mean);
  }
  out.write("mip.csv", csv.text());
  return json{{"max_mean_mip", largest}};
}

json dispatch(const ExperimentConfig& cfg, OutputSet& out) {
  switch (cfg.experiment) {
    case Experiment::example1: return run_example1(cfg, out);
    case Experiment::example2: return run_example2();
    case Experiment::fig1: return run_fig1(cfg, out);
    case Experiment::roc: return run_roc(cfg, out);
    case Experiment::bound: return run_bound(cfg, out);
    case Experiment::auc: return run_auc(cfg, out);
    case Experiment::mip: return run_mip(cfg, out);
  }
  throw Error("unknown experiment");
}

template <class E>
[[noreturn]] void rethrow_with_context(const E& e, std::string_view experiment) {
  throw E(std::string(experiment) + ": " + e.what());
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buffer.data(), ptr);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest initialisation failed");
  }
  std::array<char, 1 << 16> chunk{};
  while (in) {
    in.read(chunk.data(), chunk.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), chunk.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  std::ostringstream hex;
  for (unsigned int k = 0; k < length; ++k) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return hex.str();
}

json config_to_json(const ExperimentConfig& cfg) {
  return json{
      {"experiment", std::string(experiment_name(cfg.experiment))},
      {"model",
       {{"n", cfg.model.n},
        {"T", cfg.model.horizon},
        {"sigma2", cfg.model.sigma2},
        {"nu2", cfg.model.nu2},
        {"p", cfg.model.p},
        {"r0", cfg.model.r0}}},
      {"grids",
       {{"pi", cfg.pi_grid},
        {"lambda", cfg.lambda_grid},
        {"theta", cfg.theta_grid},
        {"rho", cfg.rho_grid},
        {"fpr", cfg.fpr_grid},
        {"T", cfg.horizon_grid}}},
      {"counts",
       {{"trials", cfg.trials},
        {"sims", cfg.sims},
        {"num_perms", cfg.num_perms},
        {"draws", cfg.draws},
        {"dim", cfg.dim}}},
      {"example1",
       {{"a", cfg.example1_a},
        {"N", cfg.example1_noise},
        {"beta", cfg.example1_beta},
        {"T_max", cfg.example1_max_horizon}}},
      {"run",
       {{"seed", cfg.master_seed ? json(*cfg.master_seed) : json(nullptr)},
        {"threads", cfg.threads},
        {"output", cfg.output_path.string()}}},
  };
}

RunResult run(const ExperimentConfig& cfg) {
  if (auto issues = validate(cfg); !issues.empty()) throw ConfigError(std::move(issues));

  const auto started = std::chrono::steady_clock::now();
  OutputSet out(cfg.output_path);
  const std::string_view name = experiment_name(cfg.experiment);
  json summary;
  try {
    summary = dispatch(cfg, out);
  } catch (const StabilityError& e) {
    rethrow_with_context(e, name);
  } catch (const NotPositiveDefiniteError& e) {
    rethrow_with_context(e, name);
  } catch (const NumericalError& e) {
    rethrow_with_context(e, name);
  } catch (const DegenerateBatchError& e) {
    rethrow_with_context(e, name);
  }
  summary["experiment"] = std::string(name);
  out.write("summary.json", summary.dump(2) + "\n");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json outputs = json::array();
  for (const auto& path : out.files()) {
    outputs.push_back({{"file", path.filename().string()}, {"sha256", sha256_file(path)}});
  }
  const json manifest{{"schema_version", kOutputSchemaVersion},
                      {"artifact", "netinf"},
                      {"version", NETINF_VERSION},
                      {"config", config_to_json(cfg)},
                      {"wall_time_seconds", seconds},
                      {"outputs", outputs}};
  const fs::path manifest_path = out.directory() / "manifest.json";
  write_atomically(manifest_path, manifest.dump(2) + "\n");

  return RunResult{out.directory(), out.files(), manifest_path, std::move(summary)};
}

}  // namespace netinf
