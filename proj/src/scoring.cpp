#include "mcscore/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "mcscore/error.hpp"
#include "mcscore/normal.hpp"
#include "mcscore/summation.hpp"

namespace mcscore {

std::string_view to_string(ScoringRule rule) noexcept {
  switch (rule) {
    case ScoringRule::CRPS: return "crps";
    case ScoringRule::LogS: return "logs";
    case ScoringRule::DSS: return "dss";
  }
  return "unknown";
}

std::optional<ScoringRule> parse_scoring_rule(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "crps") return ScoringRule::CRPS;
  if (lower == "logs" || lower == "log") return ScoringRule::LogS;
  if (lower == "dss") return ScoringRule::DSS;
  return std::nullopt;
}

double aux_A(double mu, double sigma2) {
  if (sigma2 < 1e-300) return std::abs(mu);
  const double sigma = std::sqrt(sigma2);
  const double z = mu / sigma;
  // 2 Phi(z) - 1 == erf(z / sqrt 2)
  return 2.0 * sigma * normal_pdf(z) + mu * std::erf(z / std::numbers::sqrt2);
}

double crps_gaussian(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::NonpositiveScale, "crps_gaussian: sigma <= 0");
  return aux_A(y - mu, sigma * sigma) - 0.5 * aux_A(0.0, 2.0 * sigma * sigma);
}

double crps_mixture_exact(const GaussianMixture& mix, double y) {
  const auto mu = mix.means();
  const auto sigma = mix.scales();
  const std::size_t m = mu.size();

  CompensatedSum first;
  for (std::size_t i = 0; i < m; ++i) first += aux_A(y - mu[i], sigma[i] * sigma[i]);

  CompensatedSum diag;
  CompensatedSum off;
  for (std::size_t i = 0; i < m; ++i) {
    const double si2 = sigma[i] * sigma[i];
    diag += aux_A(0.0, 2.0 * si2);
    for (std::size_t j = i + 1; j < m; ++j) {
      off += aux_A(mu[i] - mu[j], si2 + sigma[j] * sigma[j]);
    }
  }
  const double md = static_cast<double>(m);
  return first.value() / md - (diag.value() + 2.0 * off.value()) / (2.0 * md * md);
}

double crps_numeric(const PredictiveDistribution& dist, double y, const QuadratureSettings& q) {
  (void)mean(dist);  // natural domain: finite mean
  std::vector<double> cuts{y};
  if (const auto* emp = std::get_if<EmpiricalDist>(&dist)) {
    cuts.insert(cuts.end(), emp->sorted().begin(), emp->sorted().end());
  } else if (const auto* mix = std::get_if<GaussianMixture>(&dist)) {
    // Keep the body of the mixture on finite pieces; the tail maps then
    // only see F within 1e-15 of 0 or 1. Narrow components otherwise hide
    // inside the compressed part of the tail map.
    double lo = mix->means()[0];
    double hi = lo;
    for (std::size_t i = 0; i < mix->size(); ++i) {
      lo = std::min(lo, mix->means()[i] - 8.0 * mix->scales()[i]);
      hi = std::max(hi, mix->means()[i] + 8.0 * mix->scales()[i]);
    }
    cuts.push_back(lo);
    cuts.push_back(hi);
    const Moments mo = mix->moments();
    const double sd = std::sqrt(mo.variance);
    for (double k : {-6.0, -4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 6.0}) {
      const double c = mo.mean + k * sd;
      if (c > lo && c < hi) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto segments = real_line_segments(cuts, spread(dist));
  const auto integrand = [&dist, y](double z) {
    const double F = cdf(dist, z);
    return z < y ? F * F : (1.0 - F) * (1.0 - F);
  };
  return integrate(integrand, segments, q).value;
}

double crps_ecdf(const EmpiricalDist& emp, double y) {
  const auto x = emp.sorted();
  const std::size_t m = x.size();
  const double md = static_cast<double>(m);
  CompensatedSum acc;
  for (std::size_t k = 0; k < m; ++k) {
    const double i = static_cast<double>(k + 1);
    const double weight = (y < x[k] ? md : 0.0) - i + 0.5;
    acc += (x[k] - y) * weight;
  }
  return 2.0 * acc.value() / (md * md);
}

double crps_ecdf_kernel(std::span<const double> sample, double y) {
  if (sample.empty()) throw Error(ErrorKind::EmptyDraws, "crps_ecdf_kernel: empty sample");
  const double md = static_cast<double>(sample.size());
  CompensatedSum first;
  for (double v : sample) first += std::abs(v - y);
  CompensatedSum pairs;
  for (double a : sample) {
    for (double b : sample) pairs += std::abs(a - b);
  }
  return first.value() / md - pairs.value() / (2.0 * md * md);
}

double logs(const PredictiveDistribution& dist, double y) {
  // log of the smallest positive subnormal double; below it f(y) is 0.
  constexpr double kLogDenormMin = -744.4400719213812;
  const double lp = logpdf(dist, y);
  if (!(lp >= kLogDenormMin)) {
    throw Error(ErrorKind::DensityUnderflow,
                "predictive density underflows at observation " + std::to_string(y));
  }
  return -lp;
}

double dss(const PredictiveDistribution& dist, double y) {
  const Moments mo = moments(dist);
  if (!(mo.variance > 0.0)) {
    throw Error(ErrorKind::ZeroVariance, "dss: predictive variance is zero");
  }
  const double d = y - mo.mean;
  return std::log(mo.variance) + d * d / mo.variance;
}

double score(ScoringRule rule, const PredictiveDistribution& dist, double y,
             const ScoreOptions& options) {
  switch (rule) {
    case ScoringRule::LogS:
      return logs(dist, y);
    case ScoringRule::DSS:
      return dss(dist, y);
    case ScoringRule::CRPS:
      if (const auto* g = std::get_if<GaussianDist>(&dist)) {
        return crps_gaussian(g->mu(), g->sigma(), y);
      }
      if (const auto* mix = std::get_if<GaussianMixture>(&dist)) {
        return options.numeric_mixture_crps ? crps_numeric(dist, y, options.quadrature)
                                            : crps_mixture_exact(*mix, y);
      }
      if (const auto* emp = std::get_if<EmpiricalDist>(&dist)) return crps_ecdf(*emp, y);
      return crps_numeric(dist, y, options.quadrature);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown scoring rule");
}

}  // namespace mcscore
