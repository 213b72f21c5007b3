#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "mcscore/error.hpp"
#include "mcscore/normal.hpp"
#include "mcscore/quadrature.hpp"
#include "mcscore/rng.hpp"
#include "mcscore/summation.hpp"

using namespace mcscore;

TEST_CASE("derived seeds separate streams") {
  std::set<std::uint64_t> keys;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t i = 0; i < 50; ++i) {
      keys.insert(derive_seed(s, i, StreamTag::DgpChain));
      keys.insert(derive_seed(s, i, StreamTag::GibbsChain));
    }
  }
  CHECK(keys.size() == 400);

  CounterRng a(derive_seed(1, 2, StreamTag::Test));
  CounterRng b(derive_seed(1, 2, StreamTag::Test));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays inside the open unit interval") {
  CounterRng rng(3);
  double lo = 1.0;
  double hi = 0.0;
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(3 * std::sqrt(1.0 / 12.0 / n) / 0.5));
}

TEST_CASE("normal quantile against mpmath") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.95996398454005424).epsilon(1e-15));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.36134090240405620).epsilon(1e-14));
  CHECK(normal_quantile(0.3) == doctest::Approx(-0.524400512708040784).epsilon(1e-14));
  CHECK(normal_quantile(0.5) == 0.0);
  for (double p : {1e-300, 1e-20, 0.01, 0.2, 0.7, 0.999999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("gamma, inverse gamma and dirichlet means") {
  const int n = 1000000;
  CounterRng rng(derive_seed(5, 0, StreamTag::Test));
  for (auto [a, b] : {std::pair{2.5, 1.5}, std::pair{0.5, 2.0}, std::pair{7.5, 0.3}}) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_gamma(a, b, rng);
    CHECK(sum / n == doctest::Approx(a / b).epsilon(0.01));
  }
  {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_inverse_gamma(3.0, 4.0, rng);
    CHECK(sum / n == doctest::Approx(2.0).epsilon(0.02));
  }
  {
    double sum = 0.0;
    const double conc[2] = {8.0, 2.0};
    for (int i = 0; i < n; ++i) {
      const auto d = sample_dirichlet(conc, rng);
      CHECK_FALSE(std::abs(d[0] + d[1] - 1.0) > 1e-12);
      sum += d[0];
    }
    CHECK(sum / n == doctest::Approx(0.8).epsilon(0.01));
  }
}

TEST_CASE("quadrature on finite and infinite ranges") {
  const QuadratureSettings tight{1e-12, 1e-14, 2000};
  const std::vector<Segment> unit{Segment::finite(0.0, 1.0)};
  auto r = integrate([](double x) { return std::sqrt(x); }, unit, tight);
  CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const double cuts[1] = {0.3};
  const auto line = real_line_segments(cuts, 1.0);
  r = integrate([](double x) { return normal_pdf(x); }, line, tight);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  r = integrate([](double x) { return x * x * normal_pdf(x); }, line, tight);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  r = integrate([](double x) { return 1.0 / (std::numbers::pi * (1.0 + x * x)); }, line, tight);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("quadrature failures are typed") {
  const std::vector<Segment> unit{Segment::finite(0.0, 1.0)};
  try {
    integrate([](double x) { return std::sin(1.0 / (x + 1e-9)); }, unit, {1e-14, 1e-15, 5});
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::QuadratureFailure);
  }
  try {
    integrate([](double) { return std::nan(""); }, unit, {});
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::QuadratureFailure);
  }
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s += 1.0;
  for (int i = 0; i < 10000; ++i) s += 1e-16;
  s += -1.0;
  CHECK(s.value() == doctest::Approx(1e-12).epsilon(1e-10));
}
