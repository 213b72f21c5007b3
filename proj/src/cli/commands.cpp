#include "mcscore/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mcscore/cli/config.hpp"
#include "mcscore/cli/io.hpp"
#include "mcscore/cli/manifest.hpp"
#include "mcscore/dgp.hpp"
#include "mcscore/estimators.hpp"
#include "mcscore/experiments.hpp"
#include "mcscore/msar.hpp"
#include "mcscore/parallel.hpp"
#include "mcscore/scoring.hpp"

namespace mcscore::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out_dir = "mcscore_out";
};

ToolConfig resolve_config(const std::string& config_path, const GlobalOptions& g) {
  ToolConfig cfg = config_path.empty() ? ToolConfig{} : load_config(config_path);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.experiment.seed = *g.seed;
    cfg.msar.seed = *g.seed;
  }
  cfg.experiment.workers = g.workers;
  cfg.msar.workers = g.workers;
  return cfg;
}

RunManifest start_manifest(const ToolConfig& cfg, const std::string& command,
                           const GlobalOptions& g) {
  RunManifest m;
  m.command = command;
  m.config = canonical_config(cfg, command);
  m.config_digest = config_digest(m.config);
  m.seed = cfg.seed;
  m.workers = g.workers;
  m.started_at = utc_timestamp();
  return m;
}

void finish_manifest(RunManifest& m, const GlobalOptions& g) {
  m.finished_at = utc_timestamp();
  write_manifest(fs::path(g.out_dir) / (m.command + "_manifest.json"), m);
}

fs::path output_file(RunManifest& m, const GlobalOptions& g, const std::string& suffix) {
  const fs::path p = fs::path(g.out_dir) / (m.command + "_" + suffix);
  m.outputs.push_back(p.string());
  return p;
}

std::string quantile_label(double p) {
  std::ostringstream os;
  os << 'q' << p * 100.0;
  return os.str();
}

std::string records_csv(const std::vector<experiments::DivergenceRecord>& records) {
  std::ostringstream os;
  os << "replicate,estimator,rule,m,strategy,divergence,status\n";
  for (const auto& r : records) {
    os << r.replicate << ',' << to_string(r.estimator) << ',' << to_string(r.rule) << ',' << r.m
       << ',' << (r.strategy ? to_string(*r.strategy) : "") << ','
       << format_double(r.divergence) << ',' << r.status_string() << '\n';
  }
  return os.str();
}

std::string summary_csv(const std::vector<experiments::SummaryRow>& rows,
                        const std::vector<double>& probs) {
  std::ostringstream os;
  os << "estimator,rule,m,strategy";
  for (double p : probs) os << ',' << quantile_label(p);
  os << ",n_ok,n_failed\n";
  for (const auto& r : rows) {
    os << to_string(r.estimator) << ',' << to_string(r.rule) << ',' << r.m << ','
       << (r.strategy ? to_string(*r.strategy) : "");
    for (double q : r.quantiles) os << ',' << format_double(q);
    os << ',' << r.n_ok << ',' << r.n_failed << '\n';
  }
  return os.str();
}

int cmd_simulate(const std::string& config_path, const GlobalOptions& g, std::ostream& out) {
  const ToolConfig cfg = resolve_config(config_path, g);
  RunManifest man = start_manifest(cfg, "simulate", g);
  const auto chain = dgp::sample_chain(cfg.experiment.dgp, cfg.simulate_m, cfg.experiment.burn_in,
                                       cfg.seed);
  std::ostringstream os;
  os << "i,theta_sq,x\n";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    os << i + 1 << ',' << format_double(chain.theta_sq[i]) << ',' << format_double(chain.x[i])
       << '\n';
  }
  write_atomic(output_file(man, g, "chain.csv"), os.str());
  finish_manifest(man, g);
  out << "wrote " << chain.size() << " draws to " << man.outputs.front() << '\n';
  return kExitOk;
}

int run_study(const std::string& config_path, const GlobalOptions& g, bool thinning,
              std::ostream& out) {
  ToolConfig cfg = resolve_config(config_path, g);
  const std::string command = thinning ? "thinning" : "convergence";
  RunManifest man = start_manifest(cfg, command, g);
  std::vector<experiments::DivergenceRecord> records;
  if (thinning) {
    cfg.experiment.thinning = cfg.thinning;
    records = experiments::run_thinning_study(cfg.experiment);
  } else {
    records = experiments::run_convergence_study(cfg.experiment);
  }
  const std::vector<double> probs{0.1, 0.5, 0.9};
  const auto rows = experiments::summarize(records, probs);
  write_atomic(output_file(man, g, "records.csv"), records_csv(records));
  write_atomic(output_file(man, g, "summary.csv"), summary_csv(rows, probs));
  finish_manifest(man, g);
  out << summary_csv(rows, probs);
  return kExitOk;
}

int cmd_msar(const std::string& series_path, const std::string& config_path,
             const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  ToolConfig cfg = resolve_config(config_path, g);
  const auto series = read_series(series_path);
  cfg.msar.origins = resolve_origins(cfg, series.size());
  try {
    cfg.msar.validate(series.size());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  RunManifest man = start_manifest(cfg, "msar", g);
  man.config["series"] = {{"observations", series.size()},
                          {"origins", cfg.msar.origins}};
  man.config_digest = config_digest(man.config);

  const auto ev = msar::evaluate_forecasts(series, cfg.msar);
  std::ostringstream os;
  os << "origin,chain,estimator,rule,m,score,failures\n";
  std::map<std::string, std::size_t> failure_kinds;
  for (const auto& fs : ev.per_origin) {
    os << fs.origin << ',' << fs.chain << ',' << to_string(fs.estimator) << ','
       << to_string(fs.rule) << ',' << fs.m << ',' << format_double(fs.score) << ','
       << (fs.failure ? 1 : 0) << '\n';
    if (fs.failure) ++failure_kinds[std::string(to_string(*fs.failure))];
  }
  for (const auto& ms : ev.means) {
    os << "all," << ms.chain << ',' << to_string(ms.estimator) << ',' << to_string(ms.rule) << ','
       << ms.m << ',' << format_double(ms.score) << ',' << ms.failures << '\n';
  }
  write_atomic(output_file(man, g, "scores.csv"), os.str());
  finish_manifest(man, g);
  for (const auto& [kind, n] : failure_kinds) {
    err << "note: " << n << " forecast scores excluded (" << kind << ")\n";
  }
  out << "wrote " << ev.means.size() << " mean scores to " << man.outputs.front() << '\n';
  return kExitOk;
}

struct ScoreArgs {
  std::vector<double> gaussian;
  std::string mixture;
  std::string sample;
  std::string kd;
  std::string obs;
  std::vector<double> y;
  std::string rule = "crps";
  bool numeric = false;
};

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const auto rule = parse_scoring_rule(a.rule);
  if (!rule) throw ConfigError("unknown rule '" + a.rule + "' (expected crps, logs or dss)");

  std::vector<double> ys = a.y;
  if (!a.obs.empty()) {
    const auto more = read_numbers(a.obs);
    ys.insert(ys.end(), more.begin(), more.end());
  }
  if (ys.empty()) throw ConfigError("no observations: pass --obs FILE or --y VALUES");

  std::optional<PredictiveDistribution> dist;
  try {
    if (!a.gaussian.empty()) {
      dist = GaussianDist(a.gaussian[0], a.gaussian[1]);
    } else if (!a.mixture.empty()) {
      std::vector<ConditionalParams> params;
      for (const auto& [mu, sigma] : read_pairs(a.mixture)) params.push_back({mu, sigma});
      dist = fit_mp(params);
    } else if (!a.sample.empty()) {
      dist = fit_ecdf(read_numbers(a.sample));
    } else {
      dist = fit_kd(read_numbers(a.kd));
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitDomain;
  }

  ScoreOptions opts;
  opts.numeric_mixture_crps = a.numeric;
  std::ostringstream os;
  os << "obs,y,score\n";
  double total = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    double s = 0.0;
    try {
      s = score(*rule, *dist, ys[i], opts);
    } catch (const Error& e) {
      err << "error (" << to_string(e.kind()) << ") scoring observation " << i + 1 << ": "
          << e.what() << '\n';
      return kExitDomain;
    }
    total += s;
    os << i + 1 << ',' << format_double(ys[i]) << ',' << format_double(s) << '\n';
  }
  os << "mean,," << format_double(total / static_cast<double>(ys.size())) << '\n';
  out << os.str();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo approximations of predictive distributions: scoring, "
               "convergence studies, and a Markov-switching AR(1) forecast pipeline",
               "mcscore"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer("\n" + config_reference() +
             "\nExit codes: 0 ok, 2 config error, 3 I/O error, 4 domain error.\n"
             "MCSCORE_WORKERS sets the default worker count.");

  GlobalOptions g;
  g.workers = default_workers();
  app.add_option("--seed", g.seed, "Override [run] seed");
  app.add_option("--workers", g.workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();

  std::string config_path;
  std::string series_path;

  auto* sim = app.add_subcommand("simulate", "Sample one DGP chain; writes simulate_chain.csv");
  sim->add_option("config", config_path, "Config file")->check(CLI::ExistingFile);

  auto* conv = app.add_subcommand("convergence", "Divergence-to-truth study over an m grid");
  conv->add_option("config", config_path, "Config file")->check(CLI::ExistingFile);

  auto* thin = app.add_subcommand("thinning", "S1/S2/S3 thinning comparison");
  thin->add_option("config", config_path, "Config file")->check(CLI::ExistingFile);

  auto* msar_cmd = app.add_subcommand("msar", "Expanding-window MS-AR(1) forecast evaluation");
  msar_cmd->add_option("series", series_path, "CSV with columns date,value")->required();
  msar_cmd->add_option("config", config_path, "Config file")->check(CLI::ExistingFile);

  ScoreArgs sa;
  auto* sc = app.add_subcommand("score", "Score observations under a predictive distribution");
  auto* dist_group = sc->add_option_group("distribution");
  dist_group->add_option("--gaussian", sa.gaussian, "Normal law: MU SIGMA")->expected(2);
  dist_group->add_option("--mixture", sa.mixture, "Mixture file with mu,sigma rows");
  dist_group->add_option("--sample", sa.sample, "Sample file; empirical CDF");
  dist_group->add_option("--kd", sa.kd, "Sample file; Gaussian kernel density");
  dist_group->require_option(1);
  sc->add_option("--obs", sa.obs, "File of observations, one per line");
  sc->add_option("--y", sa.y, "Observations given inline");
  sc->add_option("--rule", sa.rule, "crps, logs or dss")->capture_default_str();
  sc->add_flag("--numeric", sa.numeric, "Mixture CRPS by quadrature instead of closed form");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    // Missing files given as positional arguments are I/O errors.
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    const std::string msg = e.what();
    if (msg.find("File does not exist") != std::string::npos) return kExitIo;
    return kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, g, out);
    if (conv->parsed()) return run_study(config_path, g, false, out);
    if (thin->parsed()) return run_study(config_path, g, true, out);
    if (msar_cmd->parsed()) return cmd_msar(series_path, config_path, g, out, err);
    if (sc->parsed()) return cmd_score(sa, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitConfig;
}

}  // namespace mcscore::cli
