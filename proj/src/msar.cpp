#include "mcscore/msar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "mcscore/parallel.hpp"

namespace mcscore::msar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

void check_states(const RegressionData& data, const StatePath& states) {
  if (states.size() != data.size()) {
    throw Error(ErrorKind::InvalidArgument, "state path length differs from the data length");
  }
}

double residual(const RegressionData& data, const Beta& beta, std::size_t t) {
  return data.y[t] - beta.nu - beta.alpha * data.ylag[t];
}

// Relabel regime 0 <-> 1 in both the path and the transition matrix.
void swap_labels(MsarState& st) {
  std::swap(st.h[0], st.h[1]);
  for (auto& s : st.states) s = static_cast<std::uint8_t>(1 - s);
  Eigen::Matrix2d q;
  q << st.P(1, 1), st.P(1, 0), st.P(0, 1), st.P(0, 0);
  st.P = q;
}

}  // namespace

void MsarPriors::validate() const {
  if (!mean_beta.allFinite() || !var_beta.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "mean_beta and var_beta must be finite");
  }
  const double asym = std::abs(var_beta(0, 1) - var_beta(1, 0));
  if (asym > 1e-12 * std::max(1.0, var_beta.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::InvalidArgument, "var_beta must be symmetric");
  }
  Eigen::LLT<Eigen::Matrix2d> llt(var_beta);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "var_beta must be positive definite");
  }
  if (!std::isfinite(s_bar) || !(s_bar > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "s_bar must be positive");
  }
  if (!std::isfinite(nu_bar) || !(nu_bar > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "nu_bar must be positive");
  }
  if (!dirichlet_R.allFinite() || !(dirichlet_R.minCoeff() > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "dirichlet_R entries must be positive");
  }
}

RegressionData RegressionData::from_series(std::span<const double> series) {
  RegressionData d;
  if (series.size() < 2) return d;
  d.y.assign(series.begin() + 1, series.end());
  d.ylag.assign(series.begin(), series.end() - 1);
  return d;
}

GaussianPosterior beta_posterior(const RegressionData& data, const std::array<double, 2>& h,
                                 const StatePath& states, const MsarPriors& priors) {
  check_states(data, states);
  const Eigen::Matrix2d prior_prec = priors.var_beta.inverse();
  Eigen::Matrix2d xwx = Eigen::Matrix2d::Zero();
  Eigen::Vector2d xwy = Eigen::Vector2d::Zero();
  for (std::size_t t = 0; t < data.size(); ++t) {
    const double w = h[states[t]];
    const double x1 = data.ylag[t];
    xwx(0, 0) += w;
    xwx(0, 1) += w * x1;
    xwx(1, 1) += w * x1 * x1;
    xwy(0) += w * data.y[t];
    xwy(1) += w * x1 * data.y[t];
  }
  xwx(1, 0) = xwx(0, 1);

  const Eigen::Matrix2d prec = prior_prec + xwx;
  Eigen::LLT<Eigen::Matrix2d> llt(prec);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularPosterior, "draw_beta: posterior precision not positive definite");
  }
  GaussianPosterior post;
  post.cov = llt.solve(Eigen::Matrix2d::Identity());
  post.cov = 0.5 * (post.cov + post.cov.transpose());
  post.mean = llt.solve(prior_prec * priors.mean_beta + xwy);
  return post;
}

Beta draw_beta(const RegressionData& data, const std::array<double, 2>& h,
               const StatePath& states, const MsarPriors& priors, CounterRng& rng) {
  const GaussianPosterior post = beta_posterior(data, h, states, priors);
  Eigen::LLT<Eigen::Matrix2d> chol(post.cov);
  if (chol.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularPosterior, "draw_beta: posterior covariance not positive definite");
  }
  Eigen::Vector2d z;
  z(0) = rng.normal();
  z(1) = rng.normal();
  const Eigen::Vector2d b = post.mean + chol.matrixL() * z;
  return {b(0), b(1)};
}

GammaParams h_posterior(const RegressionData& data, const Beta& beta, const StatePath& states,
                        const MsarPriors& priors, int state) {
  check_states(data, states);
  double count = 0.0;
  double ssr = 0.0;
  for (std::size_t t = 0; t < data.size(); ++t) {
    if (states[t] != state) continue;
    const double e = residual(data, beta, t);
    count += 1.0;
    ssr += e * e;
  }
  return {0.5 * (priors.nu_bar + count), 0.5 * (priors.nu_bar * priors.s_bar + ssr)};
}

namespace {

std::array<double, 2> draw_h_unordered(const RegressionData& data, const Beta& beta,
                                       const StatePath& states, const MsarPriors& priors,
                                       CounterRng& rng) {
  std::array<double, 2> h{};
  for (int s = 0; s < 2; ++s) {
    const GammaParams g = h_posterior(data, beta, states, priors, s);
    h[s] = sample_gamma(g.shape, g.rate, rng);
  }
  return h;
}

}  // namespace

std::array<double, 2> draw_h(const RegressionData& data, const Beta& beta,
                             const StatePath& states, const MsarPriors& priors,
                             CounterRng& rng) {
  auto h = draw_h_unordered(data, beta, states, priors, rng);
  if (h[0] > h[1]) std::swap(h[0], h[1]);
  return h;
}

std::array<double, 2> stationary(const Eigen::Matrix2d& P) {
  const double leave0 = P(0, 1);
  const double leave1 = P(1, 0);
  const double total = leave0 + leave1;
  if (!(total > 0.0)) return {0.5, 0.5};
  return {leave1 / total, leave0 / total};
}

FilterResult filter_states(const RegressionData& data, const Beta& beta,
                           const std::array<double, 2>& h, const Eigen::Matrix2d& P) {
  const std::size_t T = data.size();
  if (T == 0) throw Error(ErrorKind::InvalidArgument, "filter_states: no observations");
  const double log_norm[2] = {0.5 * std::log(h[0]) - 0.5 * std::log(2.0 * std::numbers::pi),
                              0.5 * std::log(h[1]) - 0.5 * std::log(2.0 * std::numbers::pi)};
  const double logP[2][2] = {{safe_log(P(0, 0)), safe_log(P(0, 1))},
                             {safe_log(P(1, 0)), safe_log(P(1, 1))}};

  FilterResult out;
  out.filtered.resize(T);
  out.log_predicted.resize(T);
  const auto pi = stationary(P);
  std::array<double, 2> log_pred{safe_log(pi[0]), safe_log(pi[1])};

  for (std::size_t t = 0; t < T; ++t) {
    out.log_predicted[t] = log_pred;
    const double e = residual(data, beta, t);
    std::array<double, 2> lj{};
    for (int s = 0; s < 2; ++s) lj[s] = log_pred[s] + log_norm[s] - 0.5 * h[s] * e * e;
    const double lse = log_add(lj[0], lj[1]);
    if (!std::isfinite(lse)) {
      throw Error(ErrorKind::NumericalUnderflow,
                  "filter_states: all state likelihoods vanish at t = " + std::to_string(t));
    }
    out.log_likelihood += lse;
    std::array<double, 2> lf{lj[0] - lse, lj[1] - lse};
    out.filtered[t] = {std::exp(lf[0]), std::exp(lf[1])};
    for (int s2 = 0; s2 < 2; ++s2) {
      log_pred[s2] = log_add(lf[0] + logP[0][s2], lf[1] + logP[1][s2]);
    }
  }
  return out;
}

std::vector<std::array<double, 2>> smoothed_marginals(const RegressionData& data,
                                                      const Beta& beta,
                                                      const std::array<double, 2>& h,
                                                      const Eigen::Matrix2d& P) {
  const FilterResult f = filter_states(data, beta, h, P);
  const std::size_t T = data.size();
  std::vector<std::array<double, 2>> sm(T);
  sm[T - 1] = f.filtered[T - 1];
  for (std::size_t t = T - 1; t-- > 0;) {
    std::array<double, 2> ratio{};
    for (int s2 = 0; s2 < 2; ++s2) {
      const double pred = std::exp(f.log_predicted[t + 1][s2]);
      ratio[s2] = pred > 0.0 ? sm[t + 1][s2] / pred : 0.0;
    }
    for (int s = 0; s < 2; ++s) {
      sm[t][s] = f.filtered[t][s] * (P(s, 0) * ratio[0] + P(s, 1) * ratio[1]);
    }
    const double z = sm[t][0] + sm[t][1];
    sm[t][0] /= z;
    sm[t][1] /= z;
  }
  return sm;
}

StatePath draw_states(const RegressionData& data, const Beta& beta,
                      const std::array<double, 2>& h, const Eigen::Matrix2d& P,
                      CounterRng& rng) {
  const FilterResult f = filter_states(data, beta, h, P);
  const std::size_t T = data.size();
  StatePath s(T);
  s[T - 1] = rng.uniform() < f.filtered[T - 1][0] ? 0 : 1;
  for (std::size_t t = T - 1; t-- > 0;) {
    const int next = s[t + 1];
    const double w0 = f.filtered[t][0] * P(0, next);
    const double w1 = f.filtered[t][1] * P(1, next);
    const double tot = w0 + w1;
    if (!(tot > 0.0)) {
      throw Error(ErrorKind::NumericalUnderflow,
                  "draw_states: backward weights vanish at t = " + std::to_string(t));
    }
    s[t] = rng.uniform() * tot < w0 ? 0 : 1;
  }
  return s;
}

Eigen::Matrix2d draw_P(const StatePath& states, const MsarPriors& priors, CounterRng& rng) {
  if (states.empty()) throw Error(ErrorKind::InvalidArgument, "draw_P: empty state path");
  double counts[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (std::size_t t = 1; t < states.size(); ++t) counts[states[t - 1]][states[t]] += 1.0;
  Eigen::Matrix2d P;
  for (int r = 0; r < 2; ++r) {
    const double conc[2] = {priors.dirichlet_R(r, 0) + counts[r][0],
                            priors.dirichlet_R(r, 1) + counts[r][1]};
    const auto row = sample_dirichlet(conc, rng);
    P(r, 0) = row[0];
    P(r, 1) = 1.0 - row[0];
  }
  return P;
}

void gibbs_sweep(const RegressionData& data, MsarState& st, const MsarPriors& priors,
                 CounterRng& rng) {
  const auto b = draw_beta(data, st.h, st.states, priors, rng);
  st.beta = b;
  st.h = draw_h_unordered(data, st.beta, st.states, priors, rng);
  if (st.h[0] > st.h[1]) swap_labels(st);
  st.states = draw_states(data, st.beta, st.h, st.P, rng);
  st.P = draw_P(st.states, priors, rng);
}

MsarState initial_state(const RegressionData& data, const MsarPriors& priors) {
  const std::size_t T = data.size();
  MsarState st;
  st.beta = {priors.mean_beta(0), priors.mean_beta(1)};
  for (int r = 0; r < 2; ++r) {
    const double tot = priors.dirichlet_R(r, 0) + priors.dirichlet_R(r, 1);
    st.P(r, 0) = priors.dirichlet_R(r, 0) / tot;
    st.P(r, 1) = 1.0 - st.P(r, 0);
  }

  double ybar = 0.0;
  for (double v : data.y) ybar += v;
  ybar /= static_cast<double>(T);
  std::vector<double> d(T);
  for (std::size_t t = 0; t < T; ++t) d[t] = (data.y[t] - ybar) * (data.y[t] - ybar);
  std::vector<double> tmp = d;
  const auto mid = tmp.begin() + static_cast<std::ptrdiff_t>(T / 2);
  std::nth_element(tmp.begin(), mid, tmp.end());
  const double median = *mid;

  st.states.resize(T);
  double sum[2] = {0.0, 0.0};
  double cnt[2] = {0.0, 0.0};
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const int s = d[t] > median ? 0 : 1;
    st.states[t] = static_cast<std::uint8_t>(s);
    sum[s] += d[t];
    cnt[s] += 1.0;
    total += d[t];
  }
  const double overall = total / static_cast<double>(T);
  for (int s = 0; s < 2; ++s) {
    double v = cnt[s] > 0.0 ? sum[s] / cnt[s] : overall;
    if (!(v > 0.0)) v = overall > 0.0 ? overall : 1.0;
    st.h[s] = 1.0 / v;
  }
  if (st.h[0] > st.h[1]) std::swap(st.h[0], st.h[1]);
  return st;
}

GibbsRun run_gibbs(std::span<const double> series, const MsarPriors& priors,
                   const GibbsConfig& config) {
  priors.validate();
  if (series.size() < 10) {
    throw Error(ErrorKind::InvalidArgument, "run_gibbs: needs at least 10 observations");
  }
  for (double v : series) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "run_gibbs: non-finite data");
  }
  if (config.n_keep == 0) throw Error(ErrorKind::InvalidArgument, "run_gibbs: n_keep must be positive");

  const RegressionData data = RegressionData::from_series(series);
  const double y_last = series.back();
  CounterRng rng(derive_seed(config.seed, 0, StreamTag::GibbsChain));
  MsarState st = initial_state(data, priors);

  GibbsRun run;
  run.config = config;
  if (config.store_states) run.draws.reserve(config.n_keep);
  run.predictive.reserve(config.n_keep);

  for (std::size_t it = 0; it < config.n_burn + config.n_keep; ++it) {
    gibbs_sweep(data, st, priors, rng);
    if (it < config.n_burn) continue;
    const int s_last = st.states.back();
    const int s_next = rng.uniform() < st.P(s_last, 0) ? 0 : 1;
    run.predictive.push_back({st.beta.nu + st.beta.alpha * y_last, 1.0 / std::sqrt(st.h[s_next])});
    if (config.store_states) {
      run.draws.push_back(st);
    } else {
      MsarState lite;
      lite.beta = st.beta;
      lite.h = st.h;
      lite.P = st.P;
      run.draws.push_back(std::move(lite));
    }
  }
  return run;
}

SimulatedSeries simulate(const Beta& beta, const std::array<double, 2>& h,
                         const Eigen::Matrix2d& P, std::size_t n, double y0, CounterRng& rng) {
  SimulatedSeries out;
  if (n == 0) return out;
  out.y.reserve(n);
  out.y.push_back(y0);
  if (n == 1) return out;
  out.states.reserve(n - 1);
  const auto pi = stationary(P);
  int s = rng.uniform() < pi[0] ? 0 : 1;
  for (std::size_t t = 1; t < n; ++t) {
    if (t > 1) s = rng.uniform() < P(s, 0) ? 0 : 1;
    out.states.push_back(static_cast<std::uint8_t>(s));
    out.y.push_back(beta.nu + beta.alpha * out.y.back() + rng.normal() / std::sqrt(h[s]));
  }
  return out;
}

// ----------------------------------------------------------- evaluation

void ForecastConfig::validate(std::size_t series_size) const {
  priors.validate();
  if (n_keep == 0) throw Error(ErrorKind::InvalidArgument, "n_keep must be positive");
  if (chains == 0) throw Error(ErrorKind::InvalidArgument, "chains must be positive");
  if (m_grid.empty()) throw Error(ErrorKind::InvalidArgument, "m_grid must not be empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] == 0 || m_grid[i] > n_keep) {
      throw Error(ErrorKind::InvalidArgument, "m_grid values must lie in [1, n_keep]");
    }
    if (i > 0 && m_grid[i] <= m_grid[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "m_grid must be strictly ascending");
    }
  }
  if (estimators.empty()) throw Error(ErrorKind::InvalidArgument, "estimators must not be empty");
  if (rules.empty()) throw Error(ErrorKind::InvalidArgument, "rules must not be empty");
  if (origins.empty()) throw Error(ErrorKind::InvalidArgument, "origins must not be empty");
  for (std::size_t o : origins) {
    if (o < 10 || o >= series_size) {
      throw Error(ErrorKind::InvalidArgument,
                  "origin " + std::to_string(o) + " outside [10, " +
                      std::to_string(series_size) + ")");
    }
  }
}

namespace {

std::vector<ForecastScore> score_origin(std::span<const double> series, std::size_t origin,
                                        std::size_t chain, const ForecastConfig& cfg) {
  const std::uint64_t chain_seed = derive_seed(cfg.seed, chain, StreamTag::GibbsChain);
  GibbsConfig gc;
  gc.n_burn = cfg.n_burn;
  gc.n_keep = cfg.n_keep;
  gc.seed = derive_seed(chain_seed, origin, StreamTag::GibbsChain);
  gc.store_states = false;
  const GibbsRun run = run_gibbs(series.first(origin), cfg.priors, gc);

  CounterRng rng(derive_seed(chain_seed, origin, StreamTag::PredictiveDraws));
  std::vector<double> x(run.predictive.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal(run.predictive[i].mu, run.predictive[i].sigma);
  }
  const double y = series[origin];
  const std::span<const ConditionalParams> params(run.predictive);

  std::vector<ForecastScore> out;
  for (Estimator est : cfg.estimators) {
    for (std::size_t m : cfg.m_grid) {
      std::optional<PredictiveDistribution> dist;
      std::optional<ErrorKind> fit_error;
      try {
        const std::span<const double> xs(x.data(), m);
        switch (est) {
          case Estimator::MP: dist = fit_mp(params.first(m)); break;
          case Estimator::ECDF: dist = fit_ecdf(xs); break;
          case Estimator::KD: dist = fit_kd(xs); break;
          case Estimator::GA: dist = fit_ga(xs); break;
        }
      } catch (const Error& e) {
        fit_error = e.kind();
      }
      for (ScoringRule rule : cfg.rules) {
        ForecastScore fs{origin, chain, est, rule, m, std::numeric_limits<double>::quiet_NaN(),
                         fit_error};
        if (!fit_error) {
          try {
            fs.score = score(rule, *dist, y, cfg.score_options);
          } catch (const Error& e) {
            fs.failure = e.kind();
          }
        }
        out.push_back(fs);
      }
    }
  }
  return out;
}

}  // namespace

ForecastEvaluation evaluate_forecasts(std::span<const double> series,
                                      const ForecastConfig& config) {
  config.validate(series.size());
  const std::size_t n_tasks = config.origins.size() * config.chains;
  std::vector<std::vector<ForecastScore>> results(n_tasks);
  parallel_for(n_tasks, config.workers, [&](std::size_t k) {
    const std::size_t origin = config.origins[k / config.chains];
    const std::size_t chain = k % config.chains;
    results[k] = score_origin(series, origin, chain, config);
  });

  ForecastEvaluation ev;
  for (auto& r : results) {
    ev.per_origin.insert(ev.per_origin.end(), r.begin(), r.end());
  }

  for (std::size_t c = 0; c < config.chains; ++c) {
    for (Estimator est : config.estimators) {
      for (ScoringRule rule : config.rules) {
        for (std::size_t m : config.m_grid) {
          MeanScore ms{c, est, rule, m, 0.0, 0, 0};
          double sum = 0.0;
          for (const auto& fs : ev.per_origin) {
            if (fs.chain != c || fs.estimator != est || fs.rule != rule || fs.m != m) continue;
            if (fs.failure) {
              ++ms.failures;
            } else {
              sum += fs.score;
              ++ms.n_ok;
            }
          }
          ms.score = ms.n_ok > 0 ? sum / static_cast<double>(ms.n_ok)
                                 : std::numeric_limits<double>::quiet_NaN();
          ev.means.push_back(ms);
        }
      }
    }
  }
  return ev;
}

}  // namespace mcscore::msar
