#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mcscore::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility record written next to every command's data files.
struct RunManifest {
  std::string command;
  std::string config_digest;
  nlohmann::json config;  // canonical form the digest was computed from
  std::uint64_t seed = 0;
  int workers = 1;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// True when the stored digest matches the digest of the stored config.
bool digest_matches(const RunManifest& m);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace mcscore::cli
