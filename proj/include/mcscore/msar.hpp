#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mcscore/error.hpp"
#include "mcscore/estimators.hpp"
#include "mcscore/rng.hpp"
#include "mcscore/scoring.hpp"

// Two-state Markov-switching AR(1):
//   y_t = nu + alpha y_{t-1} + e_t,  e_t ~ N(0, 1 / h_{s_t}),
// with s_t a first-order Markov chain with transition matrix P.
// State index 0 is the high-variance regime (h[0] < h[1]).
namespace mcscore::msar {

struct MsarPriors {
  Eigen::Vector2d mean_beta = Eigen::Vector2d::Zero();
  Eigen::Matrix2d var_beta = 25.0 * Eigen::Matrix2d::Identity();
  double s_bar = 0.3;
  double nu_bar = 3.0;
  Eigen::Matrix2d dirichlet_R = (Eigen::Matrix2d() << 8.0, 2.0, 2.0, 8.0).finished();

  void validate() const;
};

/// The series recast as a regression of y_t on (1, y_{t-1}).
struct RegressionData {
  std::vector<double> y;
  std::vector<double> ylag;

  static RegressionData from_series(std::span<const double> series);
  std::size_t size() const noexcept { return y.size(); }
};

struct Beta {
  double nu = 0.0;
  double alpha = 0.0;
};

using StatePath = std::vector<std::uint8_t>;

struct MsarState {
  Beta beta;
  std::array<double, 2> h{1.0, 1.0};  // precisions 1 / eta_s^2
  StatePath states;
  Eigen::Matrix2d P = Eigen::Matrix2d::Constant(0.5);
};

struct GaussianPosterior {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

/// Conjugate GLS posterior of (nu, alpha) with observation weights h_{s_t}.
GaussianPosterior beta_posterior(const RegressionData& data, const std::array<double, 2>& h,
                                 const StatePath& states, const MsarPriors& priors);
Beta draw_beta(const RegressionData& data, const std::array<double, 2>& h,
               const StatePath& states, const MsarPriors& priors, CounterRng& rng);

struct GammaParams {
  double shape;
  double rate;
};
/// Gamma((nu_bar + T_s) / 2, (nu_bar s_bar + SSR_s) / 2) for state s.
GammaParams h_posterior(const RegressionData& data, const Beta& beta, const StatePath& states,
                        const MsarPriors& priors, int state);
/// Draws both precisions and orders them so that h[0] <= h[1].
std::array<double, 2> draw_h(const RegressionData& data, const Beta& beta,
                             const StatePath& states, const MsarPriors& priors,
                             CounterRng& rng);

/// Stationary law of a 2x2 transition matrix; uniform when P is reducible.
std::array<double, 2> stationary(const Eigen::Matrix2d& P);

struct FilterResult {
  std::vector<std::array<double, 2>> filtered;  // p(s_t | y_1..t)
  std::vector<std::array<double, 2>> log_predicted;
  double log_likelihood = 0.0;
};

/// Hamilton filter in log space, started from the stationary law of P.
/// Throws NumericalUnderflow when every state is impossible at some t.
FilterResult filter_states(const RegressionData& data, const Beta& beta,
                           const std::array<double, 2>& h, const Eigen::Matrix2d& P);

/// Smoothed marginals p(s_t | y_1..T) from the same forward pass.
std::vector<std::array<double, 2>> smoothed_marginals(const RegressionData& data,
                                                      const Beta& beta,
                                                      const std::array<double, 2>& h,
                                                      const Eigen::Matrix2d& P);

/// Forward filtering, backward sampling: one joint draw of the state path.
StatePath draw_states(const RegressionData& data, const Beta& beta,
                      const std::array<double, 2>& h, const Eigen::Matrix2d& P,
                      CounterRng& rng);

/// Row r ~ Dirichlet(R_r + transition counts out of r).
Eigen::Matrix2d draw_P(const StatePath& states, const MsarPriors& priors, CounterRng& rng);

/// One sweep in the order beta, h, states, P. When the h draw comes out of
/// order the state labels and P are permuted with it.
void gibbs_sweep(const RegressionData& data, MsarState& state, const MsarPriors& priors,
                 CounterRng& rng);

/// Deterministic start: beta at the prior mean, states by thresholding
/// squared demeaned responses at their median, P at the prior mean.
MsarState initial_state(const RegressionData& data, const MsarPriors& priors);

struct GibbsConfig {
  std::size_t n_burn = 1000;
  std::size_t n_keep = 4000;
  std::uint64_t seed = 1;
  bool store_states = true;
};

struct GibbsRun {
  std::vector<MsarState> draws;
  std::vector<ConditionalParams> predictive;
  GibbsConfig config;
};

/// Runs the sampler on `series` (at least 10 values) and records, per kept
/// iteration, the one-step-ahead Gaussian predictive: mean nu + alpha y_T and
/// standard deviation eta of a next state drawn from row s_T of P.
GibbsRun run_gibbs(std::span<const double> series, const MsarPriors& priors,
                   const GibbsConfig& config);

struct SimulatedSeries {
  std::vector<double> y;
  StatePath states;
};

/// Draws y_2..y_n from the model given y_1 = y0; s_1 from the stationary law.
SimulatedSeries simulate(const Beta& beta, const std::array<double, 2>& h,
                         const Eigen::Matrix2d& P, std::size_t n, double y0, CounterRng& rng);

// ----------------------------------------------------------- evaluation

struct ForecastConfig {
  MsarPriors priors;
  std::size_t n_burn = 1000;
  std::size_t n_keep = 4000;
  std::size_t chains = 4;
  std::uint64_t seed = 1;
  std::vector<std::size_t> m_grid{1000, 4000};
  std::vector<Estimator> estimators{Estimator::MP, Estimator::ECDF, Estimator::KD,
                                    Estimator::GA};
  std::vector<ScoringRule> rules{ScoringRule::CRPS, ScoringRule::LogS};
  /// Number of leading observations used for each forecast; the target is
  /// the next value. Each origin must lie in [10, series size).
  std::vector<std::size_t> origins;
  ScoreOptions score_options{};
  int workers = 1;

  void validate(std::size_t series_size) const;
};

struct ForecastScore {
  std::size_t origin = 0;
  std::size_t chain = 0;
  Estimator estimator = Estimator::MP;
  ScoringRule rule = ScoringRule::CRPS;
  std::size_t m = 0;
  double score = 0.0;
  std::optional<ErrorKind> failure;
};

/// Time-averaged score of one (chain, estimator, rule, m) over the origins
/// that scored successfully; `failures` counts the excluded origins.
struct MeanScore {
  std::size_t chain = 0;
  Estimator estimator = Estimator::MP;
  ScoringRule rule = ScoringRule::CRPS;
  std::size_t m = 0;
  double score = 0.0;
  std::size_t n_ok = 0;
  std::size_t failures = 0;
};

struct ForecastEvaluation {
  std::vector<ForecastScore> per_origin;
  std::vector<MeanScore> means;
};

/// Expanding-window evaluation: every (origin, chain) runs its own sampler
/// on the data up to the origin. Scores at m use the first m kept draws.
ForecastEvaluation evaluate_forecasts(std::span<const double> series,
                                      const ForecastConfig& config);

}  // namespace mcscore::msar
