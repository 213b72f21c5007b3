#include "mcscore/rng.hpp"

#include <cmath>

#include "mcscore/error.hpp"
#include "mcscore/normal.hpp"

namespace mcscore {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, StreamTag tag) noexcept {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (index * kGolden + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ULL));
  return h;
}

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() noexcept { return normal_quantile(uniform()); }

double sample_gamma(double shape, double rate, CounterRng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw Error(ErrorKind::InvalidArgument, "gamma shape and rate must be positive");
  }
  if (shape < 1.0) {
    const double boosted = sample_gamma(shape + 1.0, 1.0, rng);
    return boosted * std::pow(rng.uniform(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_inverse_gamma(double shape, double b, CounterRng& rng) {
  return 1.0 / sample_gamma(shape, b, rng);
}

std::vector<double> sample_dirichlet(std::span<const double> concentration, CounterRng& rng) {
  if (concentration.empty()) {
    throw Error(ErrorKind::InvalidArgument, "dirichlet needs at least one concentration");
  }
  std::vector<double> out(concentration.size());
  double total = 0.0;
  for (std::size_t k = 0; k < concentration.size(); ++k) {
    out[k] = sample_gamma(concentration[k], 1.0, rng);
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace mcscore
