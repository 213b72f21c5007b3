#include "mcscore/cli/manifest.hpp"

#include "mcscore/cli/config.hpp"
#include "mcscore/cli/io.hpp"

namespace mcscore::cli {

nlohmann::json to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config_digest", m.config_digest},
          {"config", m.config},
          {"seed", m.seed},
          {"workers", m.workers},
          {"tool_version", m.tool_version},
          {"started_at", m.started_at},
          {"finished_at", m.finished_at},
          {"outputs", m.outputs}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.workers = j.at("workers").get<int>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

bool digest_matches(const RunManifest& m) { return config_digest(m.config) == m.config_digest; }

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  write_atomic(path, to_json(m).dump(2) + "\n");
}

}  // namespace mcscore::cli
