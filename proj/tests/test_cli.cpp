#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mcscore/cli.hpp"
#include "mcscore/cli/config.hpp"
#include "mcscore/cli/io.hpp"
#include "mcscore/cli/manifest.hpp"
#include "mcscore/msar.hpp"
#include "mcscore/rng.hpp"

namespace fs = std::filesystem;
using namespace mcscore;
using namespace mcscore::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mcscore_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("score prints per-observation and mean scores") {
  auto r = run({"score", "--gaussian", "0", "1", "--y", "0", "--rule", "crps"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("1,0,0.233694977255109") != std::string::npos);
  CHECK(r.out.find("mean,,0.233694977255109") != std::string::npos);

  r = run({"score", "--gaussian", "0", "1", "--y", "0", "--rule", "dss"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("mean,,0\n") != std::string::npos);

  const auto dir = scratch("score");
  write_file(dir / "sample.txt", "x\n1\n2\n3\n");
  r = run({"score", "--sample", (dir / "sample.txt").string(), "--y", "0", "--rule", "logs"});
  CHECK(r.code == kExitDomain);
  CHECK(r.err.find("no_density") != std::string::npos);

  write_file(dir / "constant.txt", "2\n2\n");
  r = run({"score", "--sample", (dir / "constant.txt").string(), "--y", "0", "--rule", "dss"});
  CHECK(r.code == kExitDomain);

  write_file(dir / "mix.csv", "mu,sigma\n-1,1\n1,1\n");
  write_file(dir / "obs.txt", "0\n");
  r = run({"score", "--mixture", (dir / "mix.csv").string(), "--obs", (dir / "obs.txt").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("0.35940887857148") != std::string::npos);

  r = run({"score", "--gaussian", "0", "1", "--kd", (dir / "sample.txt").string(), "--y", "0"});
  CHECK(r.code == kExitConfig);
  r = run({"score", "--sample", (dir / "missing.txt").string(), "--y", "0"});
  CHECK(r.code == kExitIo);
}

TEST_CASE("simulate writes data and a manifest") {
  const auto dir = scratch("simulate");
  write_file(dir / "sim.ini", "[dgp]\nalpha = 0.9\n[simulate]\nm = 25\n");
  const auto out1 = dir / "a";
  const auto out2 = dir / "b";
  REQUIRE(run({"--out", out1.string(), "simulate", (dir / "sim.ini").string()}).code == kExitOk);
  REQUIRE(run({"simulate", (dir / "sim.ini").string(), "--out", out2.string()}).code == kExitOk);
  const auto csv = read_file(out1 / "simulate_chain.csv");
  CHECK(count_lines(csv) == 26);
  CHECK(csv == read_file(out2 / "simulate_chain.csv"));

  auto j1 = nlohmann::json::parse(read_file(out1 / "simulate_manifest.json"));
  auto j2 = nlohmann::json::parse(read_file(out2 / "simulate_manifest.json"));
  const auto m1 = manifest_from_json(j1);
  CHECK(digest_matches(m1));
  CHECK(m1.config["dgp"]["alpha"] == 0.9);
  for (auto* j : {&j1, &j2}) {
    j->erase("started_at");
    j->erase("finished_at");
    j->erase("outputs");
  }
  CHECK(j1 == j2);
}

TEST_CASE("config errors exit with code 2 and name the field") {
  const auto dir = scratch("config");
  write_file(dir / "bad.ini", "[dgp]\nalpha = 1.5\n");
  auto r = run({"--out", dir.string(), "simulate", (dir / "bad.ini").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("alpha") != std::string::npos);

  write_file(dir / "k0.ini", "[experiment]\nreplicates = 0\n");
  CHECK(run({"--out", dir.string(), "convergence", (dir / "k0.ini").string()}).code == kExitConfig);

  write_file(dir / "typo.ini", "[experiment]\nreplicate = 4\n");
  r = run({"--out", dir.string(), "convergence", (dir / "typo.ini").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("replicate") != std::string::npos);

  CHECK(run({"--out", dir.string(), "convergence", (dir / "nope.ini").string()}).code == kExitIo);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("config digest ignores key order") {
  const auto a = parse_config("[dgp]\nalpha = 0.3\nn = 20\n[run]\nseed = 4\n");
  const auto b = parse_config("[run]\nseed = 4\n[dgp]\nn = 20\nalpha = 0.3\n");
  for (const char* cmd : {"simulate", "convergence", "thinning", "msar"}) {
    CHECK(config_digest(canonical_config(a, cmd)) == config_digest(canonical_config(b, cmd)));
  }
  const auto c = parse_config("[dgp]\nalpha = 0.31\nn = 20\n[run]\nseed = 4\n");
  CHECK(config_digest(canonical_config(a, "simulate")) != config_digest(canonical_config(c, "simulate")));
  CHECK(config_digest(canonical_config(a, "simulate")).size() == 64);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(
      "; desk run\n[experiment]\nm_grid = 10, 20\nestimators = mp, kd\nrules = crps\n"
      "[thinning]\ntau = 5\nstrategies = S1,S3\n[msar]\nchains = 2\nm_grid = 5,10\n"
      "n_keep = 10\nnumeric_crps = true\n[priors]\nvar_beta = 4,0,0,4\n");
  CHECK(cfg.experiment.m_grid == std::vector<std::size_t>{10, 20});
  CHECK(cfg.experiment.estimators.size() == 2);
  CHECK(cfg.thinning.tau == 5);
  CHECK(cfg.thinning.strategies.size() == 2);
  CHECK(cfg.msar.chains == 2);
  CHECK(cfg.msar.score_options.numeric_mixture_crps);
  CHECK(cfg.msar.priors.var_beta(1, 1) == 4.0);
  CHECK_THROWS_AS(parse_config("[experiment]\nm_grid = 20,10\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nrules = crps,brier\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dgp]\nalpha = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[msar]\nholdout = 5\norigins = 20,21\n"), ConfigError);
  CHECK_FALSE(config_reference().empty());
}

TEST_CASE("doubles round-trip through the CSV format") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("convergence output does not depend on workers") {
  const auto dir = scratch("workers");
  write_file(dir / "c.ini", "[experiment]\nreplicates = 4\nm_grid = 30,60\n");
  REQUIRE(run({"--workers", "1", "--out", (dir / "w1").string(), "convergence", (dir / "c.ini").string()}).code == kExitOk);
  REQUIRE(run({"--workers", "8", "--out", (dir / "w8").string(), "convergence", (dir / "c.ini").string()}).code == kExitOk);
  const auto a = read_file(dir / "w1" / "convergence_records.csv");
  CHECK(count_lines(a) == 1 + 4 * 2 * 4 * 3);
  CHECK(a == read_file(dir / "w8" / "convergence_records.csv"));
  CHECK(read_file(dir / "w1" / "convergence_summary.csv") ==
        read_file(dir / "w8" / "convergence_summary.csv"));
  CHECK(a.rfind("replicate,estimator,rule,m,strategy,divergence,status\n", 0) == 0);
}

TEST_CASE("thinning command") {
  const auto dir = scratch("thinning");
  write_file(dir / "t.ini", "[experiment]\nreplicates = 2\nestimators = mp\nrules = crps\n[thinning]\nm = 40\ntau = 3\n");
  REQUIRE(run({"--out", dir.string(), "thinning", (dir / "t.ini").string()}).code == kExitOk);
  const auto summary = read_file(dir / "thinning_summary.csv");
  CHECK(summary.find("mp,crps,40,S1") != std::string::npos);
  CHECK(summary.find("mp,crps,40,S2") != std::string::npos);
  CHECK(summary.find("mp,crps,120,S3") != std::string::npos);
}

TEST_CASE("msar command") {
  const auto dir = scratch("msar");
  CHECK(run({"--out", dir.string(), "msar", (dir / "missing.csv").string()}).code == kExitIo);

  CounterRng rng(derive_seed(70, 0, StreamTag::Test));
  const auto sim = msar::simulate({0.5, 0.3}, {1.0 / 9.0, 1.0},
                                  (Eigen::Matrix2d() << 0.95, 0.05, 0.05, 0.95).finished(), 400, 0.0, rng);
  std::ostringstream series;
  series << "date,value\n";
  for (std::size_t i = 0; i < sim.y.size(); ++i) series << "t" << i << ',' << format_double(sim.y[i]) << '\n';
  write_file(dir / "series.csv", series.str());
  write_file(dir / "m.ini",
             "[msar]\nchains = 2\nn_burn = 50\nn_keep = 100\nm_grid = 50,100\nholdout = 2\n"
             "rules = crps,logs\n");
  const auto r = run({"--out", dir.string(), "msar", (dir / "series.csv").string(), (dir / "m.ini").string()});
  REQUIRE(r.code == kExitOk);
  const auto csv = read_file(dir / "msar_scores.csv");
  std::size_t aggregate = 0;
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) aggregate += line.rfind("all,", 0) == 0;
  CHECK(aggregate == 2 * 4 * 2 * 2);
  CHECK(r.err.find("no_density") != std::string::npos);  // ECDF under LogS is reported

  write_file(dir / "bad_series.csv", "date,value\n2000,1\n2001,abc\n");
  CHECK(run({"--out", dir.string(), "msar", (dir / "bad_series.csv").string()}).code == kExitConfig);
  write_file(dir / "big.ini", "[msar]\nholdout = 395\n");
  CHECK(run({"--out", dir.string(), "msar", (dir / "series.csv").string(), (dir / "big.ini").string()}).code ==
        kExitConfig);
}
