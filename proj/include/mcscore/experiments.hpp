#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcscore/dgp.hpp"
#include "mcscore/divergences.hpp"
#include "mcscore/error.hpp"
#include "mcscore/estimators.hpp"
#include "mcscore/scoring.hpp"

namespace mcscore::experiments {

/// S1: m draws unthinned. S2: tau * m draws, every tau-th kept.
/// S3: tau * m draws unthinned.
enum class Strategy { S1, S2, S3 };
std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name);

struct ThinningSpec {
  std::size_t m = 1000;
  std::size_t tau = 10;
  std::vector<Strategy> strategies{Strategy::S1, Strategy::S2, Strategy::S3};
};

struct ExperimentConfig {
  dgp::DgpParams dgp{};
  std::size_t burn_in = dgp::kDefaultBurnIn;
  std::vector<std::size_t> m_grid{250, 1000, 4000};
  std::size_t replicates = 200;
  std::vector<Estimator> estimators{Estimator::MP, Estimator::ECDF, Estimator::KD,
                                    Estimator::GA};
  std::vector<ScoringRule> rules{ScoringRule::CRPS, ScoringRule::LogS, ScoringRule::DSS};
  std::uint64_t seed = 1;
  std::optional<ThinningSpec> thinning;
  QuadratureSettings quadrature{};
  int workers = 1;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

enum class RecordStatus { Ok, Undefined, Failed };

struct DivergenceRecord {
  std::size_t replicate = 0;
  Estimator estimator = Estimator::MP;
  ScoringRule rule = ScoringRule::CRPS;
  std::size_t m = 0;
  std::optional<Strategy> strategy;
  double divergence = 0.0;  // NaN unless status is Ok
  RecordStatus status = RecordStatus::Ok;
  std::optional<ErrorKind> error;

  bool ok() const noexcept { return status == RecordStatus::Ok; }
  /// "ok", "undefined", or "failed:<error kind>".
  std::string status_string() const;
};

/// K x |m_grid| x |estimators| x |rules| records. Replicate k samples one
/// chain of length max(m_grid) from derive_seed(seed, k); smaller m use its
/// prefix. ECDF with LogS is recorded as Undefined.
std::vector<DivergenceRecord> run_convergence_study(const ExperimentConfig& cfg);

/// Needs cfg.thinning. Replicate k samples one chain of length tau * m and
/// derives S1 (prefix), S2 (thinned) and S3 (full) from it. Records carry
/// the size of the sample actually used in `m`.
std::vector<DivergenceRecord> run_thinning_study(const ExperimentConfig& cfg);

/// Canonical record order: replicate, strategy, estimator, rule, m.
void sort_records(std::vector<DivergenceRecord>& records);

/// Type-7 (linear interpolation) quantile of an ascending sample.
double quantile_type7(std::span<const double> sorted, double p);

struct SummaryRow {
  Estimator estimator = Estimator::MP;
  ScoringRule rule = ScoringRule::CRPS;
  std::size_t m = 0;
  std::optional<Strategy> strategy;
  std::vector<double> quantiles;  // NaN when no record succeeded
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;       // failed or undefined
};

/// Quantiles of the clamped divergences per (estimator, rule, m, strategy).
std::vector<SummaryRow> summarize(const std::vector<DivergenceRecord>& records,
                                  const std::vector<double>& probs = {0.1, 0.5, 0.9});

/// Median of the successful records matching the key, NaN if none.
double median_of(const std::vector<DivergenceRecord>& records, Estimator est, ScoringRule rule,
                 std::size_t m, std::optional<Strategy> strategy = std::nullopt);

}  // namespace mcscore::experiments
