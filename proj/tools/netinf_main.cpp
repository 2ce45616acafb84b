#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "netinf/config.hpp"
#include "netinf/errors.hpp"
#include "netinf/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int report_config_error(const netinf::ConfigError& e) {
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& issue : e.issues()) {
    errors.push_back({{"path", issue.path}, {"message", issue.message}});
  }
  std::cerr << nlohmann::json{{"errors", errors}}.dump(2) << "\n";
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Converse bounds and recovery benchmarks for causal network inference"};
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  app.add_option("experiment", experiment,
                 "example1 | example2 | fig1 | roc | bound | auc | mip")
      ->required();
  app.add_option("--config", config_path, "INI configuration file")->required();
  app.add_option("--seed", seed, "Master seed (overrides run.seed)");
  app.add_option("--out", out_dir, "Output directory (overrides run.output)");
  app.add_option("--threads", threads, "Worker threads, 0 = all cores (overrides run.threads)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto named = netinf::parse_experiment(experiment);
    if (!named) {
      throw netinf::ConfigError({{"experiment", "unknown experiment '" + experiment + "'"}});
    }
    netinf::ExperimentConfig config = netinf::load_config(config_path, named);
    if (seed) config.master_seed = *seed;
    if (out_dir) config.output_path = *out_dir;
    if (threads) config.threads = *threads;

    const netinf::RunResult result = netinf::run(config);
    for (const auto& path : result.outputs) std::cout << path.string() << "\n";
    std::cout << result.manifest.string() << "\n";
    return 0;
  } catch (const netinf::ConfigError& e) {
    return report_config_error(e);
  } catch (const netinf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
