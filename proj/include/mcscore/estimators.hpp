#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "mcscore/distributions.hpp"

namespace mcscore {

/// Gaussian conditional predictive law F_c(. | theta_i) of one parameter draw.
struct ConditionalParams {
  double mu;
  double sigma;
};

/// How a posterior predictive law is reconstructed from simulation output.
enum class Estimator {
  MP,    // mixture of the conditional laws of the parameter draws
  ECDF,  // empirical CDF of predictive draws
  KD,    // Gaussian kernel density of predictive draws
  GA,    // moment-matched normal
};

std::string_view to_string(Estimator e) noexcept;
std::optional<Estimator> parse_estimator(std::string_view name);

enum class BandwidthRule { Silverman };

/// Equal-weight mixture of the supplied conditionals, order preserved.
GaussianMixture fit_mp(std::span<const ConditionalParams> draws);

EmpiricalDist fit_ecdf(std::span<const double> sample);

/// h = ((4/3) sd^5 / m)^(1/5) with the m - 1 standard deviation.
double silverman_bandwidth(std::span<const double> sample);

/// Location mixture of N(X_i, h^2).
GaussianMixture fit_kd(std::span<const double> sample,
                       BandwidthRule rule = BandwidthRule::Silverman);

/// N(sample mean, sample sd^2), moments from sample_moments().
GaussianDist fit_ga(std::span<const double> sample);

}  // namespace mcscore
