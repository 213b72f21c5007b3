#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "mcscore/distributions.hpp"
#include "mcscore/quadrature.hpp"

namespace mcscore {

/// Negatively oriented proper scoring rules: lower is better.
enum class ScoringRule { CRPS, LogS, DSS };

std::string_view to_string(ScoringRule rule) noexcept;
/// Accepts "crps", "logs", "dss" (case-insensitive).
std::optional<ScoringRule> parse_scoring_rule(std::string_view name);

/// E|Z| for Z ~ N(mu, sigma2); equals |mu| in the sigma2 -> 0 limit.
double aux_A(double mu, double sigma2);

double crps_gaussian(double mu, double sigma, double y);

/// Closed-form CRPS of an equal-weight normal mixture. O(m^2), with the
/// symmetric double sum evaluated over i < j only.
double crps_mixture_exact(const GaussianMixture& mix, double y);

/// CRPS by adaptive quadrature of (F(z) - 1{z >= y})^2, split at y and, for
/// empirical laws, at every sample point.
double crps_numeric(const PredictiveDistribution& dist, double y,
                    const QuadratureSettings& q = {});

/// Order-statistic form; O(m) on the stored sorted sample.
double crps_ecdf(const EmpiricalDist& emp, double y);

/// O(m^2) kernel form (1/m) sum |X_i - y| - (1/2m^2) sum sum |X_i - X_j|.
/// Kept as an independent cross-check of crps_ecdf.
double crps_ecdf_kernel(std::span<const double> sample, double y);

/// -log f(y). Throws NoDensity for empirical laws and DensityUnderflow when
/// the log density is not finite.
double logs(const PredictiveDistribution& dist, double y);

/// log var + (y - mean)^2 / var. Throws ZeroVariance / MomentUndefined
/// outside the class of laws with positive finite variance.
double dss(const PredictiveDistribution& dist, double y);

struct ScoreOptions {
  /// Use quadrature instead of the closed form for mixture CRPS.
  bool numeric_mixture_crps = false;
  QuadratureSettings quadrature{};
};

/// Dispatch to the cheapest exact path for (rule, distribution).
double score(ScoringRule rule, const PredictiveDistribution& dist, double y,
             const ScoreOptions& options = {});

}  // namespace mcscore
