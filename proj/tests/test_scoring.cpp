#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "mcscore/error.hpp"
#include "mcscore/estimators.hpp"
#include "mcscore/rng.hpp"
#include "mcscore/scoring.hpp"

using namespace mcscore;

namespace {

// High-precision reference values (mpmath, 30 digits).
constexpr double kCrpsStdNormal = 0.233694977255109;
constexpr double kMixtureVStar = 0.359408878571488;  // {(-1,1),(1,1)} at y = 0
constexpr double kStudentTStar = 0.316151053264306;  // T(0, 12/7, 14) at y = 0

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mcscore::Error");
  return ErrorKind::InvalidArgument;
}

template <typename F>
double best_seconds(F&& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

TEST_CASE("rule names round trip") {
  for (auto r : {ScoringRule::CRPS, ScoringRule::LogS, ScoringRule::DSS}) {
    CHECK(parse_scoring_rule(to_string(r)) == r);
  }
  CHECK(parse_scoring_rule("CRPS") == ScoringRule::CRPS);
  CHECK_FALSE(parse_scoring_rule("brier").has_value());
}

TEST_CASE("gaussian crps closed form") {
  CHECK(crps_gaussian(0, 1, 0) == doctest::Approx(kCrpsStdNormal).epsilon(1e-14));
  CHECK(crps_gaussian(5, 1, 5) == doctest::Approx(kCrpsStdNormal).epsilon(1e-14));
  CHECK(crps_gaussian(0, 2, 0) == doctest::Approx(0.467389954510218).epsilon(1e-14));
  CHECK(kind_of([] { (void)crps_gaussian(0, 0, 0); }) == ErrorKind::NonpositiveScale);
}

TEST_CASE("auxiliary A") {
  CHECK(aux_A(0, 1) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-15));
  CHECK(aux_A(1, 0) == 1.0);
  CHECK(aux_A(-2, 1e-301) == 2.0);
  CHECK(aux_A(1, 1) == doctest::Approx(1.166630941175373).epsilon(1e-14));
}

TEST_CASE("exact mixture crps") {
  CHECK(crps_mixture_exact(GaussianMixture({0}, {1}), 0) ==
        doctest::Approx(kCrpsStdNormal).epsilon(1e-14));
  CHECK(crps_mixture_exact(GaussianMixture({0, 0}, {1, 1}), 0) ==
        doctest::Approx(kCrpsStdNormal).epsilon(1e-14));
  CHECK(std::abs(crps_mixture_exact(GaussianMixture({-1, 1}, {1, 1}), 0) - kMixtureVStar) <= 1e-12);
}

TEST_CASE("numeric crps") {
  CHECK(std::abs(crps_numeric(GaussianDist(0, 1), 0) - kCrpsStdNormal) <= 1e-6);
  const QuadratureSettings tight{1e-11, 1e-13, 4000};
  CHECK(std::abs(crps_numeric(StudentTDist(0, 12.0 / 7.0, 14), 0, tight) - kStudentTStar) <= 1e-10);
  CHECK(std::abs(crps_numeric(StudentTDist(0, 12.0 / 7.0, 14), 0) - kStudentTStar) <= 1e-6);
  CHECK(std::abs(crps_numeric(GaussianMixture({-1, 1}, {1, 1}), 0, tight) - kMixtureVStar) <= 1e-10);
  // Cauchy has no mean, so the CRPS is undefined
  CHECK(kind_of([] { (void)crps_numeric(StudentTDist(0, 1, 1), 0); }) ==
        ErrorKind::MomentUndefined);

  CounterRng rng(derive_seed(21, 0, StreamTag::Test));
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> mu(1000);
    std::vector<double> sg(1000);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      mu[i] = rng.normal(0.0, 2.0);
      sg[i] = 0.2 + 2.0 * rng.uniform();
    }
    const GaussianMixture mix(mu, sg);
    const double y = rng.normal(0.0, 3.0);
    CHECK(std::abs(crps_numeric(mix, y) - crps_mixture_exact(mix, y)) <= 1e-6);
  }
}

TEST_CASE("ecdf crps and its kernel form") {
  CHECK(crps_ecdf(EmpiricalDist({1, 2}), 1.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(crps_ecdf(EmpiricalDist({0}), 1.0) == 1.0);
  CHECK(crps_ecdf(EmpiricalDist({0}), 0.0) == 0.0);
  CHECK(crps_ecdf_kernel(std::vector<double>{1, 2}, 1.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(crps_ecdf_kernel(std::vector<double>{0, 0, 0}, 0) == 0.0);
  CHECK(crps_ecdf_kernel(std::vector<double>{-1, 1}, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(crps_ecdf(EmpiricalDist({-1, 1}), 0) == doctest::Approx(0.5).epsilon(1e-15));

  CounterRng rng(derive_seed(22, 0, StreamTag::Test));
  for (int rep = 0; rep < 50; ++rep) {
    const auto m = 1 + static_cast<std::size_t>(rng.uniform() * 400);
    std::vector<double> x(m);
    for (auto& v : x) v = rng.normal(1.0, 3.0);
    const double y = rng.normal(0.0, 4.0);
    const double a = crps_ecdf(EmpiricalDist(x), y);
    const double b = crps_ecdf_kernel(x, y);
    CHECK(std::abs(a - b) <= 1e-9 * std::abs(b));
    // the quadrature path also lands on the step-function integral
    CHECK(std::abs(crps_numeric(EmpiricalDist(x), y) - b) <= 1e-6);
  }
}

TEST_CASE("logarithmic score") {
  CHECK(logs(GaussianDist(0, 1), 0) == doctest::Approx(0.918938533204673).epsilon(1e-15));
  CHECK(logs(GaussianDist(0, 1), 2) == doctest::Approx(2.918938533204673).epsilon(1e-15));
  CHECK(logs(GaussianMixture({-1, 1}, {1, 1}), 0) ==
        doctest::Approx(1.418938533204673).epsilon(1e-14));
  CHECK(kind_of([] { (void)logs(EmpiricalDist({1, 2}), 1.5); }) == ErrorKind::NoDensity);
  // log density near -800: reported, never turned into +inf
  CHECK(kind_of([] { (void)logs(GaussianDist(0, 1), 40); }) == ErrorKind::DensityUnderflow);
  CHECK(kind_of([] { (void)logs(GaussianMixture({0, 1}, {1, 1}), -45); }) ==
        ErrorKind::DensityUnderflow);
  // far but representable tail stays exact
  CHECK(logs(GaussianDist(0, 1), 38) == doctest::Approx(0.918938533204673 + 722).epsilon(1e-15));
}

TEST_CASE("dawid-sebastiani score") {
  CHECK(dss(GaussianDist(0, 1), 0) == 0.0);
  CHECK(dss(GaussianDist(0, 1), 2) == 4.0);
  CHECK(kind_of([] { (void)dss(EmpiricalDist({0, 0}), 1.0); }) == ErrorKind::ZeroVariance);
  CHECK(kind_of([] { (void)dss(StudentTDist(0, 1, 2), 1.0); }) == ErrorKind::MomentUndefined);
  CHECK(dss(StudentTDist(0, 12.0 / 7.0, 14), 0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("score dispatch") {
  CHECK(score(ScoringRule::CRPS, EmpiricalDist({1, 2}), 1.5) == doctest::Approx(0.25));
  CHECK(score(ScoringRule::DSS, GaussianDist(0, 1), 0) == 0.0);
  CHECK(kind_of([] { (void)score(ScoringRule::LogS, EmpiricalDist({1, 2}), 1.5); }) ==
        ErrorKind::NoDensity);
  const GaussianMixture mix({-1, 1}, {1, 1});
  ScoreOptions numeric;
  numeric.numeric_mixture_crps = true;
  CHECK(std::abs(score(ScoringRule::CRPS, mix, 0, numeric) - kMixtureVStar) <= 1e-6);
  CHECK(score(ScoringRule::CRPS, mix, 0) == doctest::Approx(kMixtureVStar).epsilon(1e-13));
}

TEST_CASE("crps is translation invariant for every law") {
  const std::vector<PredictiveDistribution> laws{
      GaussianDist(0.2, 1.3), StudentTDist(0, 12.0 / 7.0, 14),
      GaussianMixture({-1, 0.5, 2}, {0.7, 1, 0.4}), EmpiricalDist({-1, 0.3, 0.3, 2.5})};
  for (const auto& law : laws) {
    for (double c : {-3.0, 0.7, 10.0}) {
      const double a = score(ScoringRule::CRPS, law, 0.4);
      const double b = score(ScoringRule::CRPS, shift(law, c), 0.4 + c);
      CHECK(std::abs(a - b) <= 1e-10);
    }
  }
}

TEST_CASE("cost grows as the closed forms predict") {
  CounterRng rng(derive_seed(23, 0, StreamTag::Test));
  auto sample = [&](std::size_t m) {
    std::vector<double> x(m);
    for (auto& v : x) v = rng.normal();
    return x;
  };
  {
    const EmpiricalDist small(sample(200000));
    const EmpiricalDist large(sample(800000));
    volatile double sink = 0.0;
    const double t1 = best_seconds([&] { sink = sink + crps_ecdf(small, 0.1); });
    const double t4 = best_seconds([&] { sink = sink + crps_ecdf(large, 0.1); });
    CHECK(t4 / t1 <= 5.0);
  }
  {
    std::vector<double> s1(1000, 1.0);
    std::vector<double> s4(4000, 1.0);
    const GaussianMixture small(sample(1000), s1);
    const GaussianMixture large(sample(4000), s4);
    volatile double sink = 0.0;
    const double t1 = best_seconds([&] { sink = sink + crps_mixture_exact(small, 0.1); });
    const double t4 = best_seconds([&] { sink = sink + crps_mixture_exact(large, 0.1); });
    const double ratio = t4 / t1;
    MESSAGE("exact mixture CRPS cost ratio for 4x m: " << ratio);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}
