#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcscore/experiments.hpp"
#include "mcscore/msar.hpp"

namespace mcscore::cli {

/// Unreadable or invalid configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or unwritable files (exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ToolConfig {
  std::uint64_t seed = 1;
  experiments::ExperimentConfig experiment{};
  experiments::ThinningSpec thinning{};
  std::size_t simulate_m = 4000;

  msar::ForecastConfig msar{};
  /// Forecast the last `holdout` observations unless `origins` is given.
  std::size_t msar_holdout = 20;
  std::vector<std::size_t> msar_origins;
};

/// INI text: `key = value` lines under `[section]` headers, `;` or `#`
/// comments, lists comma separated. Unknown sections or keys are errors.
ToolConfig parse_config(const std::string& text);
ToolConfig load_config(const std::filesystem::path& path);

/// Documented keys and defaults, shown by --help.
std::string config_reference();

/// Fully resolved settings relevant to `command`, as a JSON object whose
/// keys are sorted, so the digest ignores the key order of the input file.
nlohmann::json canonical_config(const ToolConfig& cfg, std::string_view command);
/// Hex SHA-256 of the compact dump of `canonical`.
std::string config_digest(const nlohmann::json& canonical);

/// Origins for a series of the given length: explicit list, else holdout.
std::vector<std::size_t> resolve_origins(const ToolConfig& cfg, std::size_t series_size);

}  // namespace mcscore::cli
