#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netinf/errors.hpp"
#include "netinf/model.hpp"

namespace netinf {

enum class Experiment { example1, example2, fig1, roc, bound, auc, mip };

std::string_view experiment_name(Experiment experiment);
std::optional<Experiment> parse_experiment(std::string_view name);

/// Everything a run needs. Values not given in the config file keep the
/// per-experiment defaults from defaults_for().
struct ExperimentConfig {
  Experiment experiment = Experiment::example2;
  ModelParams model;

  std::vector<double> pi_grid;
  std::vector<double> lambda_grid;
  std::vector<double> theta_grid;
  std::vector<double> rho_grid;
  std::vector<double> fpr_grid;
  std::vector<std::size_t> horizon_grid;

  std::size_t trials = 2000;
  std::size_t sims = 100;
  std::size_t num_perms = 100;
  std::size_t draws = 10;
  std::size_t dim = 10;

  std::vector<double> example1_a;
  std::vector<double> example1_noise;
  double example1_beta = 0.5;
  std::size_t example1_max_horizon = 10;

  std::optional<std::uint64_t> master_seed;
  std::filesystem::path output_path = "netinf-out";
  unsigned threads = 1;
};

struct ConfigIssue {
  std::string path;
  std::string message;
};

/// Thrown for unreadable or invalid configurations; carries every issue
/// found, each tagged with a `section.key` path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

ExperimentConfig defaults_for(Experiment experiment);

/// Parses INI-style text. Unknown sections or keys, malformed values and
/// duplicate keys are errors. `experiment` comes from the command line; a
/// top-level `experiment = ...` key in the file must agree with it.
ExperimentConfig parse_config(std::string_view text, std::optional<Experiment> experiment);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<Experiment> experiment);

/// Structural and range checks. Never touches a random number generator.
std::vector<ConfigIssue> validate(const ExperimentConfig& config);

/// Parses a grid: comma-separated numbers, linspace(a, b, k) or
/// logspace(a, b, k) (powers of ten from 10^a to 10^b).
std::vector<double> parse_grid(std::string_view text);

}  // namespace netinf
