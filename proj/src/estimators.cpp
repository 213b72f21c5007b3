#include "mcscore/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "mcscore/error.hpp"

namespace mcscore {

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::MP: return "mp";
    case Estimator::ECDF: return "ecdf";
    case Estimator::KD: return "kd";
    case Estimator::GA: return "ga";
  }
  return "unknown";
}

std::optional<Estimator> parse_estimator(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mp") return Estimator::MP;
  if (lower == "ecdf") return Estimator::ECDF;
  if (lower == "kd" || lower == "kde") return Estimator::KD;
  if (lower == "ga") return Estimator::GA;
  return std::nullopt;
}

GaussianMixture fit_mp(std::span<const ConditionalParams> draws) {
  if (draws.empty()) throw Error(ErrorKind::EmptyDraws, "fit_mp: no parameter draws");
  std::vector<double> mu;
  std::vector<double> sigma;
  mu.reserve(draws.size());
  sigma.reserve(draws.size());
  for (const auto& d : draws) {
    mu.push_back(d.mu);
    sigma.push_back(d.sigma);
  }
  return GaussianMixture(std::move(mu), std::move(sigma));
}

EmpiricalDist fit_ecdf(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorKind::EmptyDraws, "fit_ecdf: no draws");
  return EmpiricalDist(std::vector<double>(sample.begin(), sample.end()));
}

namespace {

Moments checked_moments(std::span<const double> sample, const char* who) {
  if (sample.size() < 2) {
    throw Error(ErrorKind::TooFewDraws, std::string(who) + ": needs at least two draws");
  }
  const Moments mo = sample_moments(sample);
  if (!(mo.variance > 0.0)) {
    throw Error(ErrorKind::ZeroVariance, std::string(who) + ": sample variance is zero");
  }
  return mo;
}

}  // namespace

double silverman_bandwidth(std::span<const double> sample) {
  const Moments mo = checked_moments(sample, "silverman_bandwidth");
  const double sd = std::sqrt(mo.variance);
  return std::pow(4.0 / 3.0 * std::pow(sd, 5) / static_cast<double>(sample.size()), 0.2);
}

GaussianMixture fit_kd(std::span<const double> sample, BandwidthRule rule) {
  double h = 0.0;
  switch (rule) {
    case BandwidthRule::Silverman:
      h = silverman_bandwidth(sample);
      break;
  }
  return GaussianMixture::with_common_scale(std::vector<double>(sample.begin(), sample.end()), h);
}

GaussianDist fit_ga(std::span<const double> sample) {
  const Moments mo = checked_moments(sample, "fit_ga");
  return GaussianDist(mo.mean, std::sqrt(mo.variance));
}

}  // namespace mcscore
