#pragma once

#include <optional>
#include <utility>

#include "mcscore/distributions.hpp"
#include "mcscore/quadrature.hpp"
#include "mcscore/scoring.hpp"

namespace mcscore {

/// d_S(F, G) = S(F, G) - S(G, G). `value` is the raw quadrature result and
/// may dip below zero by roughly the integration tolerance.
struct DivergenceValue {
  double value = 0.0;
  ScoringRule rule = ScoringRule::CRPS;
  std::optional<std::pair<double, double>> truncation;

  double clamped() const noexcept { return value > 0.0 ? value : 0.0; }
};

/// Integrated squared CDF difference. Symmetric in (F, G).
DivergenceValue div_crps(const PredictiveDistribution& F, const PredictiveDistribution& G,
                         const QuadratureSettings& q = {});

/// Kullback-Leibler divergence of F from G, i.e. integral of g log(g / f),
/// over the range where both log densities stay above -700.
DivergenceValue div_kl(const PredictiveDistribution& F, const PredictiveDistribution& G,
                       const QuadratureSettings& q = {});

/// Closed form from the first two moments.
DivergenceValue div_dss(const PredictiveDistribution& F, const PredictiveDistribution& G);

DivergenceValue divergence(ScoringRule rule, const PredictiveDistribution& F,
                           const PredictiveDistribution& G, const QuadratureSettings& q = {});

/// Support limits used by div_kl: scan outward from the centre of G on a
/// doubling grid, then bisect to the last point where both log densities
/// exceed the floor. Throws EmptySupport when the centre itself fails.
std::pair<double, double> kl_truncation(const PredictiveDistribution& F,
                                        const PredictiveDistribution& G,
                                        double log_floor = -700.0);

}  // namespace mcscore
