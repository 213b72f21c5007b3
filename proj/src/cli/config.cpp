#include "mcscore/cli/config.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

namespace mcscore::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"seed"}},
      {"dgp", {"alpha", "s", "n", "burn_in"}},
      {"simulate", {"m"}},
      {"experiment", {"m_grid", "replicates", "estimators", "rules"}},
      {"thinning", {"m", "tau", "strategies"}},
      {"quadrature", {"rel_tol", "abs_tol", "max_subdivisions"}},
      {"msar",
       {"n_burn", "n_keep", "chains", "m_grid", "estimators", "rules", "origins", "holdout",
        "numeric_crps"}},
      {"priors", {"mean_beta", "var_beta", "s_bar", "nu_bar", "dirichlet_R"}},
  };
  return keys;
}

std::string where(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

double to_double(const std::string& text, const std::string& name) {
  const std::string s = boost::algorithm::trim_copy(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(name + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& text, const std::string& name) {
  const std::string s = boost::algorithm::trim_copy(text);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s[0] == '-' || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError(name + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& text, const std::string& name) {
  const std::string s = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(text));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(name + ": expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  const std::string s = boost::algorithm::trim_copy(text);
  if (s.empty()) return parts;
  boost::algorithm::split(parts, s, boost::algorithm::is_any_of(","));
  for (auto& p : parts) boost::algorithm::trim(p);
  return parts;
}

std::vector<std::size_t> to_size_list(const std::string& text, const std::string& name) {
  std::vector<std::size_t> out;
  for (const auto& p : split_list(text)) out.push_back(to_uint(p, name));
  return out;
}

std::vector<double> to_double_list(const std::string& text, const std::string& name,
                                   std::size_t expected) {
  std::vector<double> out;
  for (const auto& p : split_list(text)) out.push_back(to_double(p, name));
  if (out.size() != expected) {
    throw ConfigError(name + ": expected " + std::to_string(expected) + " values");
  }
  return out;
}

template <typename T, typename Parse>
std::vector<T> to_enum_list(const std::string& text, const std::string& name, Parse parse) {
  std::vector<T> out;
  for (const auto& p : split_list(text)) {
    const auto v = parse(p);
    if (!v) throw ConfigError(name + ": unknown entry '" + p + "'");
    if (std::find(out.begin(), out.end(), *v) != out.end()) {
      throw ConfigError(name + ": duplicate entry '" + p + "'");
    }
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError(name + ": list must not be empty");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    if constexpr (std::is_arithmetic_v<T>) {
      os << v[i];
    } else {
      os << to_string(v[i]);
    }
  }
  return os.str();
}

// Visits every (section, key, value) after checking names against the table.
template <typename F>
void for_each_entry(const pt::ptree& tree, F&& f) {
  for (const auto& [section, child] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (child.empty()) throw ConfigError("key '" + section + "' must sit inside a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, leaf] : child) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + where(section, key));
      f(section, key, leaf.data());
    }
  }
}

}  // namespace

ToolConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  ToolConfig cfg;
  auto& ex = cfg.experiment;
  auto& ms = cfg.msar;
  bool holdout_set = false;

  for_each_entry(tree, [&](const std::string& sec, const std::string& key, const std::string& v) {
    const std::string name = where(sec, key);
    if (sec == "run") {
      cfg.seed = to_uint(v, name);
    } else if (sec == "dgp") {
      if (key == "alpha") ex.dgp.alpha = to_double(v, "alpha");
      if (key == "s") ex.dgp.s = to_double(v, "s");
      if (key == "n") ex.dgp.n = to_double(v, "n");
      if (key == "burn_in") ex.burn_in = to_uint(v, name);
    } else if (sec == "simulate") {
      cfg.simulate_m = to_uint(v, name);
    } else if (sec == "experiment") {
      if (key == "m_grid") ex.m_grid = to_size_list(v, name);
      if (key == "replicates") ex.replicates = to_uint(v, name);
      if (key == "estimators") ex.estimators = to_enum_list<Estimator>(v, name, parse_estimator);
      if (key == "rules") ex.rules = to_enum_list<ScoringRule>(v, name, parse_scoring_rule);
    } else if (sec == "thinning") {
      if (key == "m") cfg.thinning.m = to_uint(v, name);
      if (key == "tau") cfg.thinning.tau = to_uint(v, name);
      if (key == "strategies") {
        cfg.thinning.strategies =
            to_enum_list<experiments::Strategy>(v, name, experiments::parse_strategy);
      }
    } else if (sec == "quadrature") {
      if (key == "rel_tol") ex.quadrature.rel_tol = to_double(v, name);
      if (key == "abs_tol") ex.quadrature.abs_tol = to_double(v, name);
      if (key == "max_subdivisions") ex.quadrature.max_subdivisions = to_uint(v, name);
    } else if (sec == "msar") {
      if (key == "n_burn") ms.n_burn = to_uint(v, name);
      if (key == "n_keep") ms.n_keep = to_uint(v, name);
      if (key == "chains") ms.chains = to_uint(v, name);
      if (key == "m_grid") ms.m_grid = to_size_list(v, name);
      if (key == "estimators") ms.estimators = to_enum_list<Estimator>(v, name, parse_estimator);
      if (key == "rules") ms.rules = to_enum_list<ScoringRule>(v, name, parse_scoring_rule);
      if (key == "origins") cfg.msar_origins = to_size_list(v, name);
      if (key == "holdout") {
        cfg.msar_holdout = to_uint(v, name);
        holdout_set = true;
      }
      if (key == "numeric_crps") ms.score_options.numeric_mixture_crps = to_bool(v, name);
    } else if (sec == "priors") {
      auto& pr = ms.priors;
      if (key == "mean_beta") {
        const auto b = to_double_list(v, name, 2);
        pr.mean_beta << b[0], b[1];
      }
      if (key == "var_beta") {
        const auto b = to_double_list(v, name, 4);
        pr.var_beta << b[0], b[1], b[2], b[3];
      }
      if (key == "s_bar") pr.s_bar = to_double(v, name);
      if (key == "nu_bar") pr.nu_bar = to_double(v, name);
      if (key == "dirichlet_R") {
        const auto b = to_double_list(v, name, 4);
        pr.dirichlet_R << b[0], b[1], b[2], b[3];
      }
    }
  });

  if (holdout_set && !cfg.msar_origins.empty()) {
    throw ConfigError("[msar] origins and holdout are mutually exclusive");
  }
  ex.seed = cfg.seed;
  ms.seed = cfg.seed;
  ms.score_options.quadrature = ex.quadrature;
  try {
    ex.validate();
    auto with_thinning = ex;
    with_thinning.thinning = cfg.thinning;
    with_thinning.validate();
    ms.priors.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.simulate_m == 0) throw ConfigError("[simulate] m must be positive");
  if (ms.n_keep == 0) throw ConfigError("[msar] n_keep must be positive");
  if (ms.chains == 0) throw ConfigError("[msar] chains must be positive");
  for (std::size_t i = 0; i < ms.m_grid.size(); ++i) {
    if (ms.m_grid[i] == 0 || ms.m_grid[i] > ms.n_keep) {
      throw ConfigError("[msar] m_grid values must lie in [1, n_keep]");
    }
    if (i > 0 && ms.m_grid[i] <= ms.m_grid[i - 1]) {
      throw ConfigError("[msar] m_grid must be strictly ascending");
    }
  }
  if (ms.m_grid.empty()) throw ConfigError("[msar] m_grid must not be empty");
  return cfg;
}

ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_reference() {
  const ToolConfig d;
  const auto& ex = d.experiment;
  const auto& ms = d.msar;
  std::ostringstream os;
  os << "Config file (INI; full-line ; or # comments; lists comma separated):\n"
     << "  [run]        seed = " << d.seed << "\n"
     << "  [dgp]        alpha = " << ex.dgp.alpha << "  s = " << ex.dgp.s << "  n = " << ex.dgp.n
     << "  burn_in = " << ex.burn_in << "\n"
     << "  [simulate]   m = " << d.simulate_m << "\n"
     << "  [experiment] m_grid = " << join(ex.m_grid) << "  replicates = " << ex.replicates
     << "\n"
     << "               estimators = " << join(ex.estimators) << "  rules = " << join(ex.rules)
     << "\n"
     << "  [thinning]   m = " << d.thinning.m << "  tau = " << d.thinning.tau
     << "  strategies = " << join(d.thinning.strategies) << "\n"
     << "  [quadrature] rel_tol = " << ex.quadrature.rel_tol
     << "  abs_tol = " << ex.quadrature.abs_tol
     << "  max_subdivisions = " << ex.quadrature.max_subdivisions << "\n"
     << "  [msar]       n_burn = " << ms.n_burn << "  n_keep = " << ms.n_keep
     << "  chains = " << ms.chains << "  m_grid = " << join(ms.m_grid) << "\n"
     << "               estimators = " << join(ms.estimators) << "  rules = " << join(ms.rules)
     << "\n"
     << "               holdout = " << d.msar_holdout
     << " (or origins = list of observation counts)  numeric_crps = false\n"
     << "  [priors]     mean_beta = 0,0  var_beta = 25,0,0,25  s_bar = " << ms.priors.s_bar
     << "  nu_bar = " << ms.priors.nu_bar << "  dirichlet_R = 8,2,2,8\n";
  return os.str();
}

nlohmann::json canonical_config(const ToolConfig& cfg, std::string_view command) {
  using nlohmann::json;
  const auto& ex = cfg.experiment;
  auto names = [](const auto& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back(std::string(to_string(e)));
    return a;
  };
  json j = json::object();
  j["command"] = std::string(command);
  j["seed"] = cfg.seed;
  if (command == "simulate" || command == "convergence" || command == "thinning") {
    j["dgp"] = {{"alpha", ex.dgp.alpha}, {"s", ex.dgp.s}, {"n", ex.dgp.n}, {"burn_in", ex.burn_in}};
  }
  if (command == "simulate") j["simulate"] = {{"m", cfg.simulate_m}};
  if (command == "convergence" || command == "thinning") {
    j["experiment"] = {{"replicates", ex.replicates},
                       {"estimators", names(ex.estimators)},
                       {"rules", names(ex.rules)}};
    if (command == "convergence") j["experiment"]["m_grid"] = ex.m_grid;
    j["quadrature"] = {{"rel_tol", ex.quadrature.rel_tol},
                       {"abs_tol", ex.quadrature.abs_tol},
                       {"max_subdivisions", ex.quadrature.max_subdivisions}};
  }
  if (command == "thinning") {
    j["thinning"] = {{"m", cfg.thinning.m},
                     {"tau", cfg.thinning.tau},
                     {"strategies", names(cfg.thinning.strategies)}};
  }
  if (command == "msar") {
    const auto& ms = cfg.msar;
    const auto& pr = ms.priors;
    j["msar"] = {{"n_burn", ms.n_burn},
                 {"n_keep", ms.n_keep},
                 {"chains", ms.chains},
                 {"m_grid", ms.m_grid},
                 {"estimators", names(ms.estimators)},
                 {"rules", names(ms.rules)},
                 {"numeric_crps", ms.score_options.numeric_mixture_crps}};
    if (cfg.msar_origins.empty()) {
      j["msar"]["holdout"] = cfg.msar_holdout;
    } else {
      j["msar"]["origins"] = cfg.msar_origins;
    }
    j["priors"] = {{"mean_beta", {pr.mean_beta(0), pr.mean_beta(1)}},
                   {"var_beta", {pr.var_beta(0, 0), pr.var_beta(0, 1), pr.var_beta(1, 0),
                                 pr.var_beta(1, 1)}},
                   {"s_bar", pr.s_bar},
                   {"nu_bar", pr.nu_bar},
                   {"dirichlet_R", {pr.dirichlet_R(0, 0), pr.dirichlet_R(0, 1),
                                    pr.dirichlet_R(1, 0), pr.dirichlet_R(1, 1)}}};
    j["quadrature"] = {{"rel_tol", ms.score_options.quadrature.rel_tol},
                       {"abs_tol", ms.score_options.quadrature.abs_tol},
                       {"max_subdivisions", ms.score_options.quadrature.max_subdivisions}};
  }
  return j;
}

std::string config_digest(const nlohmann::json& canonical) {
  const std::string text = canonical.dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::vector<std::size_t> resolve_origins(const ToolConfig& cfg, std::size_t series_size) {
  if (!cfg.msar_origins.empty()) return cfg.msar_origins;
  if (cfg.msar_holdout == 0 || cfg.msar_holdout + 10 > series_size) {
    throw ConfigError("[msar] holdout " + std::to_string(cfg.msar_holdout) +
                      " does not fit a series of " + std::to_string(series_size) +
                      " observations (at least 10 must precede the first origin)");
  }
  std::vector<std::size_t> origins;
  for (std::size_t o = series_size - cfg.msar_holdout; o < series_size; ++o) origins.push_back(o);
  return origins;
}

}  // namespace mcscore::cli
