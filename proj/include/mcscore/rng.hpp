#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace mcscore {

/// Purpose tags keep the random streams of one replicate independent.
enum class StreamTag : std::uint64_t {
  DgpChain = 1,
  GibbsChain = 2,
  PredictiveDraws = 3,
  Test = 99,
};

/// Key for the stream (seed, index, tag). Distinct triples give unrelated
/// streams, so replicates can be generated in any order or thread.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, StreamTag tag) noexcept;

/// Counter-based generator: output k is a bijective mix of key + k * gamma
/// (the SplitMix64 construction). Every variate below is built from these
/// bits with portable arithmetic, so streams are platform independent.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;
  std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal by inversion.
  double normal() noexcept;
  double normal(double mu, double sigma) noexcept { return mu + sigma * normal(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Gamma(shape, rate), mean shape / rate. Marsaglia-Tsang squeeze; shapes
/// below one use the U^(1/shape) boost.
double sample_gamma(double shape, double rate, CounterRng& rng);

/// Z ~ IG(shape, b) when 1/Z ~ Gamma(shape, rate = b); mean b / (shape - 1).
double sample_inverse_gamma(double shape, double b, CounterRng& rng);

/// Normalized Gamma(concentration_k, 1) draws.
std::vector<double> sample_dirichlet(std::span<const double> concentration, CounterRng& rng);

}  // namespace mcscore
