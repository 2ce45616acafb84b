#include "netinf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace netinf {
namespace {

namespace pt = boost::property_tree;

constexpr std::pair<Experiment, std::string_view> kExperimentNames[] = {
    {Experiment::example1, "example1"}, {Experiment::example2, "example2"},
    {Experiment::fig1, "fig1"},         {Experiment::roc, "roc"},
    {Experiment::bound, "bound"},       {Experiment::auc, "auc"},
    {Experiment::mip, "mip"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

std::vector<std::size_t> parse_count_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (auto part : split_commas(text)) {
    const auto value = parse_number<std::size_t>(part);
    if (!value) throw std::invalid_argument("expected a comma-separated list of counts");
    out.push_back(*value);
  }
  return out;
}

// One recognised key: where it lives and how to store it.
struct KeyHandler {
  std::string path;
  std::function<void(ExperimentConfig&, std::string_view)> apply;
};

template <class T>
std::function<void(ExperimentConfig&, std::string_view)> number_into(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& cfg, std::string_view text) {
    const auto value = parse_number<T>(text);
    if (!value) throw std::invalid_argument("not a valid number");
    cfg.*field = *value;
  };
}

template <class T>
std::function<void(ExperimentConfig&, std::string_view)> model_number(T ModelParams::*field) {
  return [field](ExperimentConfig& cfg, std::string_view text) {
    const auto value = parse_number<T>(text);
    if (!value) throw std::invalid_argument("not a valid number");
    cfg.model.*field = *value;
  };
}

std::function<void(ExperimentConfig&, std::string_view)> grid_into(
    std::vector<double> ExperimentConfig::*field) {
  return [field](ExperimentConfig& cfg, std::string_view text) { cfg.*field = parse_grid(text); };
}

const std::vector<KeyHandler>& key_handlers() {
  static const std::vector<KeyHandler> handlers = {
      {"run.seed",
       [](ExperimentConfig& cfg, std::string_view text) {
         const auto value = parse_number<std::uint64_t>(text);
         if (!value) throw std::invalid_argument("seed must be a non-negative integer");
         cfg.master_seed = *value;
       }},
      {"run.threads", number_into(&ExperimentConfig::threads)},
      {"run.output",
       [](ExperimentConfig& cfg, std::string_view text) {
         cfg.output_path = std::string(trim(text));
       }},
      {"model.n", model_number(&ModelParams::n)},
      {"model.T", model_number(&ModelParams::horizon)},
      {"model.sigma2", model_number(&ModelParams::sigma2)},
      {"model.nu2", model_number(&ModelParams::nu2)},
      {"model.p", model_number(&ModelParams::p)},
      {"model.r0", model_number(&ModelParams::r0)},
      {"grids.pi", grid_into(&ExperimentConfig::pi_grid)},
      {"grids.lambda", grid_into(&ExperimentConfig::lambda_grid)},
      {"grids.theta", grid_into(&ExperimentConfig::theta_grid)},
      {"grids.rho", grid_into(&ExperimentConfig::rho_grid)},
      {"grids.fpr", grid_into(&ExperimentConfig::fpr_grid)},
      {"grids.T",
       [](ExperimentConfig& cfg, std::string_view text) {
         cfg.horizon_grid = parse_count_list(text);
       }},
      {"counts.trials", number_into(&ExperimentConfig::trials)},
      {"counts.sims", number_into(&ExperimentConfig::sims)},
      {"counts.num_perms", number_into(&ExperimentConfig::num_perms)},
      {"counts.draws", number_into(&ExperimentConfig::draws)},
      {"counts.dim", number_into(&ExperimentConfig::dim)},
      {"example1.a", grid_into(&ExperimentConfig::example1_a)},
      {"example1.N", grid_into(&ExperimentConfig::example1_noise)},
      {"example1.beta", number_into(&ExperimentConfig::example1_beta)},
      {"example1.T_max", number_into(&ExperimentConfig::example1_max_horizon)},
  };
  return handlers;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return out;
}

void check_unit_interval(std::vector<ConfigIssue>& issues, const std::string& path,
                         const std::vector<double>& grid, bool open, bool increasing) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = grid[k];
    const bool inside = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
    if (!inside) {
      issues.push_back({path, std::string("values must lie in ") + (open ? "(0, 1)" : "[0, 1]")});
      return;
    }
    if (increasing && k > 0 && !(grid[k] > grid[k - 1])) {
      issues.push_back({path, "values must be strictly increasing"});
      return;
    }
  }
}

void require_nonempty(std::vector<ConfigIssue>& issues, const std::string& path,
                      std::size_t size) {
  if (size == 0) issues.push_back({path, "grid must not be empty"});
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error([&] {
        std::string text = "invalid configuration:";
        for (const auto& issue : issues) text += " " + issue.path + ": " + issue.message + ";";
        return text;
      }()),
      issues_(std::move(issues)) {}

std::string_view experiment_name(Experiment experiment) {
  for (const auto& [value, name] : kExperimentNames) {
    if (value == experiment) return name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [value, known] : kExperimentNames) {
    if (known == name) return value;
  }
  return std::nullopt;
}

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  for (std::string_view fn : {"linspace", "logspace"}) {
    if (text.substr(0, fn.size()) != fn) continue;
    std::string_view rest = trim(text.substr(fn.size()));
    if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')') {
      throw std::invalid_argument(std::string(fn) + " expects (start, stop, count)");
    }
    const auto args = split_commas(rest.substr(1, rest.size() - 2));
    if (args.size() != 3) throw std::invalid_argument(std::string(fn) + " takes three arguments");
    const auto lo = parse_number<double>(args[0]);
    const auto hi = parse_number<double>(args[1]);
    const auto count = parse_number<std::size_t>(args[2]);
    if (!lo || !hi || !count || *count == 0) {
      throw std::invalid_argument(std::string(fn) + " arguments are malformed");
    }
    auto grid = linspace(*lo, *hi, *count);
    if (fn == "logspace") {
      for (double& v : grid) v = std::pow(10.0, v);
    }
    return grid;
  }
  std::vector<double> out;
  if (text.empty()) return out;
  for (auto part : split_commas(text)) {
    const auto value = parse_number<double>(part);
    if (!value) throw std::invalid_argument("expected numbers, linspace(...) or logspace(...)");
    out.push_back(*value);
  }
  return out;
}

ExperimentConfig defaults_for(Experiment experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.pi_grid = linspace(0.025, 0.975, 21);
  cfg.fpr_grid = linspace(0.0, 1.0, 201);
  cfg.lambda_grid = {0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1,
                     0.15, 0.2, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0};
  cfg.theta_grid = {0.001, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 0.99};
  cfg.rho_grid = linspace(0.05, 0.95, 19);
  cfg.horizon_grid = {1, 2, 3, 5, 8, 13, 20, 30, 50};
  cfg.example1_a = {0.5, 1.0, 2.0};
  cfg.example1_noise = {0.0, 1.0};
  switch (experiment) {
    case Experiment::fig1:
      cfg.trials = 1000;
      break;
    case Experiment::auc:
      // The envelope minimizes over pi, so a fine grid keeps it tight.
      cfg.pi_grid = linspace(0.0005, 0.9995, 1001);
      break;
    case Experiment::mip:
      cfg.model.n = 200;
      cfg.model.p = 0.05;
      break;
    default:
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(std::string_view text, std::optional<Experiment> experiment) {
  pt::ptree tree;
  try {
    std::istringstream stream{std::string(text)};
    pt::ini_parser::read_ini(stream, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({{"<file>", "line " + std::to_string(e.line()) + ": " + e.message()}});
  }

  std::vector<ConfigIssue> issues;
  std::map<std::string, std::string> entries;
  for (const auto& [section, node] : tree) {
    if (node.empty()) {
      entries[section] = node.data();
      continue;
    }
    for (const auto& [key, leaf] : node) entries[section + "." + key] = leaf.data();
  }

  if (auto it = entries.find("experiment"); it != entries.end()) {
    const auto named = parse_experiment(std::string(trim(it->second)));
    if (!named) {
      issues.push_back({"experiment", "unknown experiment '" + it->second + "'"});
    } else if (experiment && *experiment != *named) {
      issues.push_back({"experiment", "file names '" + it->second +
                                          "' but the command line asks for '" +
                                          std::string(experiment_name(*experiment)) + "'"});
    } else {
      experiment = named;
    }
    entries.erase(it);
  }
  if (!experiment) {
    issues.push_back({"experiment", "experiment not given on the command line or in the file"});
    throw ConfigError(std::move(issues));
  }

  ExperimentConfig cfg = defaults_for(*experiment);
  for (const auto& [path, value] : entries) {
    const auto& handlers = key_handlers();
    const auto handler = std::find_if(handlers.begin(), handlers.end(),
                                      [&](const KeyHandler& h) { return h.path == path; });
    if (handler == handlers.end()) {
      issues.push_back({path, "unknown key"});
      continue;
    }
    try {
      handler->apply(cfg, value);
    } catch (const std::invalid_argument& e) {
      issues.push_back({path, e.what()});
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<Experiment> experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{"<file>", "cannot read " + path.string()}});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), experiment);
}

std::vector<ConfigIssue> validate(const ExperimentConfig& cfg) {
  std::vector<ConfigIssue> issues;
  if (!cfg.master_seed) issues.push_back({"run.seed", "mandatory field is missing"});
  if (cfg.output_path.empty()) issues.push_back({"run.output", "must not be empty"});

  const ModelParams& m = cfg.model;
  const Experiment e = cfg.experiment;
  {
    if (m.n < 1) issues.push_back({"model.n", "must be >= 1"});
    if (!(m.sigma2 > 0.0)) issues.push_back({"model.sigma2", "must be > 0"});
    if (!(m.nu2 >= 0.0)) issues.push_back({"model.nu2", "must be >= 0"});
    if (!(m.p >= 0.0 && m.p <= 1.0)) issues.push_back({"model.p", "must lie in [0, 1]"});
    if (!(m.r0 > 0.0 && m.r0 < 1.0)) issues.push_back({"model.r0", "must lie in (0, 1)"});
  }

  switch (e) {
    case Experiment::example1:
      require_nonempty(issues, "example1.a", cfg.example1_a.size());
      require_nonempty(issues, "example1.N", cfg.example1_noise.size());
      for (double a : cfg.example1_a) {
        if (a == 0.0) issues.push_back({"example1.a", "coefficients must be nonzero"});
      }
      for (double n : cfg.example1_noise) {
        if (n < 0.0) issues.push_back({"example1.N", "noise ratios must be >= 0"});
      }
      if (!(cfg.example1_beta > 0.0 && cfg.example1_beta < 1.0)) {
        issues.push_back({"example1.beta", "must lie in (0, 1)"});
      }
      break;
    case Experiment::example2:
      break;
    case Experiment::fig1:
      if (cfg.dim < 2) issues.push_back({"counts.dim", "must be >= 2"});
      if (cfg.trials < 1) issues.push_back({"counts.trials", "must be >= 1"});
      break;
    case Experiment::roc:
    case Experiment::bound:
      if (e == Experiment::roc) {
        require_nonempty(issues, "grids.lambda", cfg.lambda_grid.size());
        require_nonempty(issues, "grids.theta", cfg.theta_grid.size());
        for (double l : cfg.lambda_grid) {
          if (l < 0.0) issues.push_back({"grids.lambda", "values must be >= 0"});
        }
        check_unit_interval(issues, "grids.theta", cfg.theta_grid, true, false);
        if (cfg.sims < 1) issues.push_back({"counts.sims", "must be >= 1"});
        if (cfg.num_perms < 20) issues.push_back({"counts.num_perms", "must be >= 20"});
        if (m.horizon < 2) issues.push_back({"model.T", "must be >= 2 for recovery"});
      }
      require_nonempty(issues, "grids.pi", cfg.pi_grid.size());
      require_nonempty(issues, "grids.fpr", cfg.fpr_grid.size());
      check_unit_interval(issues, "grids.pi", cfg.pi_grid, true, true);
      check_unit_interval(issues, "grids.fpr", cfg.fpr_grid, false, true);
      if (cfg.trials < 2) issues.push_back({"counts.trials", "must be >= 2"});
      break;
    case Experiment::auc:
      require_nonempty(issues, "grids.rho", cfg.rho_grid.size());
      require_nonempty(issues, "grids.pi", cfg.pi_grid.size());
      check_unit_interval(issues, "grids.rho", cfg.rho_grid, false, false);
      check_unit_interval(issues, "grids.pi", cfg.pi_grid, true, true);
      check_unit_interval(issues, "grids.fpr", cfg.fpr_grid, false, true);
      if (cfg.fpr_grid.size() < 2) issues.push_back({"grids.fpr", "needs at least two points"});
      break;
    case Experiment::mip:
      require_nonempty(issues, "grids.T", cfg.horizon_grid.size());
      for (std::size_t k = 0; k < cfg.horizon_grid.size(); ++k) {
        if (cfg.horizon_grid[k] < 1 ||
            (k > 0 && cfg.horizon_grid[k] <= cfg.horizon_grid[k - 1])) {
          issues.push_back({"grids.T", "horizons must be increasing and >= 1"});
          break;
        }
      }
      if (cfg.draws < 1) issues.push_back({"counts.draws", "must be >= 1"});
      break;
  }
  return issues;
}

}  // namespace netinf
