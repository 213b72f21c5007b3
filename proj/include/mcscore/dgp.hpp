#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mcscore/distributions.hpp"

namespace mcscore::dgp {

inline constexpr std::size_t kDefaultBurnIn = 100;

/// Hyper-parameters of the compound-Gaussian chain.
struct DgpParams {
  double alpha = 0.5;  // persistence, |alpha| < 1
  double s = 2.0;      // unconditional mean of theta^2
  double n = 12.0;     // tail / variance control

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Parameter draws theta_i^2 and predictive draws X_i ~ N(0, theta_i^2).
struct DgpChain {
  std::vector<double> theta_sq;
  std::vector<double> x;
  DgpParams params;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return x.size(); }
};

/// Invariant law of X: T(0, ns / (n + 2), n + 2).
StudentTDist invariant_cdf(const DgpParams& p);

/// Mean of upsilon_i^2, the average autoregressive coefficient of theta^2.
double persistence(const DgpParams& p);

/// Markov chain
///   psi_i ~ IG((n + 3) / 2, ns(1 - alpha^2) / 2)
///   upsilon_i | psi_i ~ N(alpha, psi_i / (ns))
///   theta_i^2 = psi_i + upsilon_i^2 theta_{i-1}^2
///   X_i | theta_i^2 ~ N(0, theta_i^2)
/// started at theta_0^2 = s. The first `burn_in` pairs are discarded.
DgpChain sample_chain(const DgpParams& p, std::size_t m, std::size_t burn_in,
                      std::uint64_t seed);

/// Keep indices tau - 1, 2 tau - 1, ... (0-based); length floor(m / tau).
DgpChain thin(const DgpChain& chain, std::size_t tau);

}  // namespace mcscore::dgp
