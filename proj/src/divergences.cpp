#include "mcscore/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcscore/error.hpp"

namespace mcscore {

namespace {

double centre(const PredictiveDistribution& d) {
  if (const auto* t = std::get_if<StudentTDist>(&d)) return t->location();
  return moments(d).mean;
}

void append_sample_points(const PredictiveDistribution& d, std::vector<double>& cuts) {
  if (const auto* emp = std::get_if<EmpiricalDist>(&d)) {
    cuts.insert(cuts.end(), emp->sorted().begin(), emp->sorted().end());
  }
}

}  // namespace

DivergenceValue div_crps(const PredictiveDistribution& F, const PredictiveDistribution& G,
                         const QuadratureSettings& q) {
  const double mf = mean(F);
  const double mg = mean(G);
  std::vector<double> cuts{0.5 * (mf + mg)};
  append_sample_points(F, cuts);
  append_sample_points(G, cuts);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto segments = real_line_segments(cuts, std::max(spread(F), spread(G)));
  const auto integrand = [&F, &G](double z) {
    const double d = cdf(F, z) - cdf(G, z);
    return d * d;
  };
  return {integrate(integrand, segments, q).value, ScoringRule::CRPS, std::nullopt};
}

std::pair<double, double> kl_truncation(const PredictiveDistribution& F,
                                        const PredictiveDistribution& G, double log_floor) {
  const auto inside = [&](double z) {
    return logpdf(F, z) > log_floor && logpdf(G, z) > log_floor;
  };
  const double c = centre(G);
  if (!inside(c)) {
    throw Error(ErrorKind::EmptySupport, "log densities below floor at the centre of G");
  }
  const double step = spread(G);
  const auto outermost = [&](double direction) {
    double good = 0.0;
    double bad = -1.0;
    double offset = step;
    for (int k = 0; k < 64; ++k, offset *= 2.0) {
      if (inside(c + direction * offset)) {
        good = offset;
      } else {
        bad = offset;
        break;
      }
    }
    if (bad < 0.0) return c + direction * good;
    for (int it = 0; it < 60 && bad - good > 1e-9 * std::max(1.0, bad); ++it) {
      const double mid = 0.5 * (good + bad);
      (inside(c + direction * mid) ? good : bad) = mid;
    }
    return c + direction * good;
  };
  return {outermost(-1.0), outermost(1.0)};
}

DivergenceValue div_kl(const PredictiveDistribution& F, const PredictiveDistribution& G,
                       const QuadratureSettings& q) {
  if (!has_density(F) || !has_density(G)) {
    throw Error(ErrorKind::NoDensity, "Kullback-Leibler divergence needs densities");
  }
  const auto [lo, hi] = kl_truncation(F, G);
  if (!(hi > lo)) throw Error(ErrorKind::EmptySupport, "truncated support is empty");
  const double c = std::clamp(centre(G), lo, hi);
  std::vector<Segment> segments;
  if (c > lo) segments.push_back(Segment::finite(lo, c));
  if (hi > c) segments.push_back(Segment::finite(c, hi));
  const auto integrand = [&F, &G](double z) {
    const double lg = logpdf(G, z);
    return std::exp(lg) * (lg - logpdf(F, z));
  };
  return {integrate(integrand, segments, q).value, ScoringRule::LogS,
          std::make_pair(lo, hi)};
}

DivergenceValue div_dss(const PredictiveDistribution& F, const PredictiveDistribution& G) {
  const Moments f = moments(F);
  const Moments g = moments(G);
  if (!(f.variance > 0.0) || !(g.variance > 0.0)) {
    throw Error(ErrorKind::ZeroVariance, "dss divergence needs positive variances");
  }
  const double ratio = g.variance / f.variance;
  const double d = f.mean - g.mean;
  return {ratio - std::log(ratio) + d * d / f.variance - 1.0, ScoringRule::DSS, std::nullopt};
}

DivergenceValue divergence(ScoringRule rule, const PredictiveDistribution& F,
                           const PredictiveDistribution& G, const QuadratureSettings& q) {
  switch (rule) {
    case ScoringRule::CRPS: return div_crps(F, G, q);
    case ScoringRule::LogS: return div_kl(F, G, q);
    case ScoringRule::DSS: return div_dss(F, G);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown scoring rule");
}

}  // namespace mcscore
