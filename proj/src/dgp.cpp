#include "mcscore/dgp.hpp"

#include <cmath>
#include <string>

#include "mcscore/error.hpp"
#include "mcscore/rng.hpp"

namespace mcscore::dgp {

void DgpParams::validate() const {
  if (!std::isfinite(alpha) || !(std::abs(alpha) < 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "alpha must lie in (-1, 1), got " + std::to_string(alpha));
  }
  if (!std::isfinite(s) || !(s > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "s must be positive, got " + std::to_string(s));
  }
  if (!std::isfinite(n) || !(n > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "n must be positive, got " + std::to_string(n));
  }
}

StudentTDist invariant_cdf(const DgpParams& p) {
  p.validate();
  return StudentTDist(0.0, p.n * p.s / (p.n + 2.0), p.n + 2.0);
}

double persistence(const DgpParams& p) {
  p.validate();
  return (p.n * p.alpha * p.alpha + 1.0) / (p.n + 1.0);
}

DgpChain sample_chain(const DgpParams& p, std::size_t m, std::size_t burn_in,
                      std::uint64_t seed) {
  p.validate();
  if (m == 0) throw Error(ErrorKind::InvalidArgument, "sample_chain: m must be positive");

  CounterRng rng(derive_seed(seed, 0, StreamTag::DgpChain));
  const double ig_shape = 0.5 * (p.n + 3.0);
  const double ig_scale = 0.5 * p.n * p.s * (1.0 - p.alpha * p.alpha);
  const double ns = p.n * p.s;

  DgpChain chain;
  chain.params = p;
  chain.seed = seed;
  chain.theta_sq.reserve(m);
  chain.x.reserve(m);

  double theta_sq = p.s;
  for (std::size_t i = 0; i < burn_in + m; ++i) {
    const double psi = sample_inverse_gamma(ig_shape, ig_scale, rng);
    const double upsilon = rng.normal(p.alpha, std::sqrt(psi / ns));
    theta_sq = psi + upsilon * upsilon * theta_sq;
    const double x = rng.normal(0.0, std::sqrt(theta_sq));
    if (i >= burn_in) {
      chain.theta_sq.push_back(theta_sq);
      chain.x.push_back(x);
    }
  }
  return chain;
}

DgpChain thin(const DgpChain& chain, std::size_t tau) {
  if (tau == 0) throw Error(ErrorKind::InvalidArgument, "thin: tau must be >= 1");
  if (chain.size() < tau) {
    throw Error(ErrorKind::TooFewDraws, "thin: chain shorter than the thinning factor");
  }
  DgpChain out;
  out.params = chain.params;
  out.seed = chain.seed;
  const std::size_t kept = chain.size() / tau;
  out.theta_sq.reserve(kept);
  out.x.reserve(kept);
  for (std::size_t i = tau - 1; i < chain.size(); i += tau) {
    out.theta_sq.push_back(chain.theta_sq[i]);
    out.x.push_back(chain.x[i]);
  }
  return out;
}

}  // namespace mcscore::dgp
