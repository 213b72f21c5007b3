#pragma once

#include <cmath>
#include <numbers>

namespace mcscore {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;

/// Standard normal density.
inline double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

/// Standard normal CDF. erfc keeps full relative precision in the lower tail.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

/// Standard normal quantile (Wichura, AS 241, PPND16); relative accuracy ~1e-16.
double normal_quantile(double p);

}  // namespace mcscore
