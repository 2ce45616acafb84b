#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "netinf/config.hpp"

namespace netinf {

inline constexpr int kOutputSchemaVersion = 1;

struct RunResult {
  std::filesystem::path directory;
  /// Result files (CSV and summary.json), in the order they were written.
  std::vector<std::filesystem::path> outputs;
  std::filesystem::path manifest;
  nlohmann::json summary;
};

/// Validates the config, runs the experiment, and writes its CSVs,
/// summary.json and manifest.json into config.output_path. Every file is
/// written to a temporary name and renamed into place. Identical configs
/// give byte-identical CSVs whatever the thread count.
///
/// Throws ConfigError for invalid configs; numerical failures propagate as
/// netinf::Error prefixed with the experiment name.
RunResult run(const ExperimentConfig& config);

/// The resolved configuration as JSON (echoed into the manifest).
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation, locale independent.
std::string format_double(double value);

}  // namespace netinf
