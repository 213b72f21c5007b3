#include "mcscore/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "mcscore/parallel.hpp"
#include "mcscore/rng.hpp"

namespace mcscore::experiments {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::S1: return "S1";
    case Strategy::S2: return "S2";
    case Strategy::S3: return "S3";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name.size() != 2 || std::toupper(static_cast<unsigned char>(name[0])) != 'S') {
    return std::nullopt;
  }
  switch (name[1]) {
    case '1': return Strategy::S1;
    case '2': return Strategy::S2;
    case '3': return Strategy::S3;
    default: return std::nullopt;
  }
}

std::string DivergenceRecord::status_string() const {
  switch (status) {
    case RecordStatus::Ok: return "ok";
    case RecordStatus::Undefined: return "undefined";
    case RecordStatus::Failed:
      return "failed:" + std::string(error ? to_string(*error) : std::string_view("unknown"));
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  dgp.validate();
  quadrature.validate();
  if (replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicates (K) must be >= 1");
  if (estimators.empty()) throw Error(ErrorKind::InvalidArgument, "estimators must not be empty");
  if (rules.empty()) throw Error(ErrorKind::InvalidArgument, "rules must not be empty");
  if (thinning) {
    if (thinning->m == 0) throw Error(ErrorKind::InvalidArgument, "thinning m must be positive");
    if (thinning->tau == 0) throw Error(ErrorKind::InvalidArgument, "thinning tau must be >= 1");
    if (thinning->strategies.empty()) {
      throw Error(ErrorKind::InvalidArgument, "strategies must not be empty");
    }
    return;
  }
  if (m_grid.empty()) throw Error(ErrorKind::InvalidArgument, "m_grid must not be empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] == 0) throw Error(ErrorKind::InvalidArgument, "m_grid values must be positive");
    if (i > 0 && m_grid[i] <= m_grid[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "m_grid must be strictly ascending");
    }
  }
}

namespace {

std::optional<PredictiveDistribution> fit(Estimator est, std::span<const double> theta_sq,
                                          std::span<const double> x) {
  switch (est) {
    case Estimator::MP: {
      std::vector<ConditionalParams> params(theta_sq.size());
      for (std::size_t i = 0; i < theta_sq.size(); ++i) params[i] = {0.0, std::sqrt(theta_sq[i])};
      return fit_mp(params);
    }
    case Estimator::ECDF: return fit_ecdf(x);
    case Estimator::KD: return fit_kd(x);
    case Estimator::GA: return fit_ga(x);
  }
  return std::nullopt;
}

// Records of every (estimator, rule) for one sample.
void evaluate_sample(const ExperimentConfig& cfg, const PredictiveDistribution& truth,
                     std::size_t replicate, std::size_t m, std::optional<Strategy> strategy,
                     std::span<const double> theta_sq, std::span<const double> x,
                     std::vector<DivergenceRecord>& out) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (Estimator est : cfg.estimators) {
    std::optional<PredictiveDistribution> dist;
    std::optional<ErrorKind> fit_error;
    try {
      dist = fit(est, theta_sq, x);
    } catch (const Error& e) {
      fit_error = e.kind();
    }
    for (ScoringRule rule : cfg.rules) {
      DivergenceRecord r{replicate, est, rule, m, strategy, nan, RecordStatus::Ok, std::nullopt};
      if (est == Estimator::ECDF && rule == ScoringRule::LogS) {
        r.status = RecordStatus::Undefined;
        r.error = ErrorKind::NoDensity;
      } else if (fit_error) {
        r.status = RecordStatus::Failed;
        r.error = fit_error;
      } else {
        try {
          r.divergence = divergence(rule, *dist, truth, cfg.quadrature).value;
        } catch (const Error& e) {
          r.status = RecordStatus::Failed;
          r.error = e.kind();
        }
      }
      out.push_back(r);
    }
  }
}

template <typename Task>
std::vector<DivergenceRecord> run_replicates(const ExperimentConfig& cfg, Task task) {
  std::vector<std::vector<DivergenceRecord>> per(cfg.replicates);
  parallel_for(cfg.replicates, cfg.workers, [&](std::size_t k) { task(k, per[k]); });
  std::vector<DivergenceRecord> all;
  for (auto& v : per) all.insert(all.end(), v.begin(), v.end());
  sort_records(all);
  return all;
}

}  // namespace

std::vector<DivergenceRecord> run_convergence_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const PredictiveDistribution truth = dgp::invariant_cdf(cfg.dgp);
  const std::size_t m_max = cfg.m_grid.back();
  return run_replicates(cfg, [&](std::size_t k, std::vector<DivergenceRecord>& out) {
    const auto chain =
        dgp::sample_chain(cfg.dgp, m_max, cfg.burn_in, derive_seed(cfg.seed, k, StreamTag::DgpChain));
    for (std::size_t m : cfg.m_grid) {
      evaluate_sample(cfg, truth, k, m, std::nullopt, std::span(chain.theta_sq).first(m),
                      std::span(chain.x).first(m), out);
    }
  });
}

std::vector<DivergenceRecord> run_thinning_study(const ExperimentConfig& cfg) {
  if (!cfg.thinning) {
    throw Error(ErrorKind::InvalidArgument, "run_thinning_study: no thinning strategies configured");
  }
  cfg.validate();
  const ThinningSpec& spec = *cfg.thinning;
  const PredictiveDistribution truth = dgp::invariant_cdf(cfg.dgp);
  return run_replicates(cfg, [&](std::size_t k, std::vector<DivergenceRecord>& out) {
    const auto chain = dgp::sample_chain(cfg.dgp, spec.tau * spec.m, cfg.burn_in,
                                         derive_seed(cfg.seed, k, StreamTag::DgpChain));
    for (Strategy s : spec.strategies) {
      switch (s) {
        case Strategy::S1:
          evaluate_sample(cfg, truth, k, spec.m, s, std::span(chain.theta_sq).first(spec.m),
                          std::span(chain.x).first(spec.m), out);
          break;
        case Strategy::S2: {
          const auto th = dgp::thin(chain, spec.tau);
          evaluate_sample(cfg, truth, k, th.size(), s, th.theta_sq, th.x, out);
          break;
        }
        case Strategy::S3:
          evaluate_sample(cfg, truth, k, chain.size(), s, chain.theta_sq, chain.x, out);
          break;
      }
    }
  });
}

void sort_records(std::vector<DivergenceRecord>& records) {
  auto key = [](const DivergenceRecord& r) {
    return std::make_tuple(r.replicate, r.strategy ? static_cast<int>(*r.strategy) : -1,
                           static_cast<int>(r.estimator), static_cast<int>(r.rule), r.m);
  };
  std::stable_sort(records.begin(), records.end(),
                   [&](const auto& a, const auto& b) { return key(a) < key(b); });
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile level outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<DivergenceRecord>& records,
                                  const std::vector<double>& probs) {
  if (records.empty()) throw Error(ErrorKind::InvalidArgument, "summarize: no records");
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "summarize: probs must lie in (0, 1)");
  }
  using Key = std::tuple<int, int, int, std::size_t>;
  struct Acc {
    std::vector<double> values;
    std::size_t failed = 0;
  };
  std::map<Key, Acc> groups;
  for (const auto& r : records) {
    Key k{r.strategy ? static_cast<int>(*r.strategy) : -1, static_cast<int>(r.estimator),
          static_cast<int>(r.rule), r.m};
    auto& acc = groups[k];
    if (r.ok()) {
      acc.values.push_back(r.divergence > 0.0 ? r.divergence : 0.0);
    } else {
      ++acc.failed;
    }
  }
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (auto& [k, acc] : groups) {
    SummaryRow row;
    const int strat = std::get<0>(k);
    if (strat >= 0) row.strategy = static_cast<Strategy>(strat);
    row.estimator = static_cast<Estimator>(std::get<1>(k));
    row.rule = static_cast<ScoringRule>(std::get<2>(k));
    row.m = std::get<3>(k);
    std::sort(acc.values.begin(), acc.values.end());
    for (double p : probs) row.quantiles.push_back(quantile_type7(acc.values, p));
    row.n_ok = acc.values.size();
    row.n_failed = acc.failed;
    rows.push_back(std::move(row));
  }
  return rows;
}

double median_of(const std::vector<DivergenceRecord>& records, Estimator est, ScoringRule rule,
                 std::size_t m, std::optional<Strategy> strategy) {
  std::vector<double> v;
  for (const auto& r : records) {
    if (r.ok() && r.estimator == est && r.rule == rule && r.m == m && r.strategy == strategy) {
      v.push_back(r.divergence > 0.0 ? r.divergence : 0.0);
    }
  }
  std::sort(v.begin(), v.end());
  return quantile_type7(v, 0.5);
}

}  // namespace mcscore::experiments
