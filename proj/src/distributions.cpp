#include "mcscore/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mcscore/error.hpp"
#include "mcscore/normal.hpp"

namespace mcscore {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::NoDensity: return "no_density";
    case ErrorKind::MomentUndefined: return "moment_undefined";
    case ErrorKind::ZeroVariance: return "zero_variance";
    case ErrorKind::DensityUnderflow: return "density_underflow";
    case ErrorKind::QuadratureFailure: return "quadrature_failure";
    case ErrorKind::EmptySupport: return "empty_support";
    case ErrorKind::EmptyDraws: return "empty_draws";
    case ErrorKind::NonpositiveScale: return "nonpositive_scale";
    case ErrorKind::TooFewDraws: return "too_few_draws";
    case ErrorKind::SingularPosterior: return "singular_posterior";
    case ErrorKind::NumericalUnderflow: return "numerical_underflow";
  }
  return "unknown";
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::InvalidArgument, "normal_quantile: p outside [0, 1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be finite");
  }
}

void require_positive_scale(double v, const char* what) {
  require_finite(v, what);
  if (!(v > 0.0)) {
    throw Error(ErrorKind::NonpositiveScale, std::string(what) + " must be > 0");
  }
}

}  // namespace

Moments sample_moments(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorKind::EmptyDraws, "sample_moments: empty sample");
  const double m = static_cast<double>(sample.size());
  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : sample) ss += (v - mean) * (v - mean);
  return {mean, sample.size() > 1 ? ss / (m - 1.0) : 0.0};
}

// ---------------------------------------------------------------- Gaussian

GaussianDist::GaussianDist(double mu, double sigma) : mu_(mu), sigma_(sigma) {
  require_finite(mu, "gaussian mu");
  require_positive_scale(sigma, "gaussian sigma");
}

double GaussianDist::cdf(double x) const { return normal_cdf((x - mu_) / sigma_); }

double GaussianDist::pdf(double x) const { return normal_pdf((x - mu_) / sigma_) / sigma_; }

double GaussianDist::logpdf(double x) const {
  const double z = (x - mu_) / sigma_;
  return -kLogSqrt2Pi - std::log(sigma_) - 0.5 * z * z;
}

// ---------------------------------------------------------------- Student t

StudentTDist::StudentTDist(double a, double b, double c) : a_(a), b_(b), c_(c) {
  require_finite(a, "student t location");
  require_positive_scale(b, "student t squared scale");
  require_positive_scale(c, "student t degrees of freedom");
  log_norm_ = boost::math::lgamma(0.5 * (c + 1.0)) - boost::math::lgamma(0.5 * c) -
              0.5 * std::log(c * std::numbers::pi) - 0.5 * std::log(b);
}

double StudentTDist::cdf(double x) const {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const boost::math::students_t_distribution<double> t(c_);
  return boost::math::cdf(t, (x - a_) / std::sqrt(b_));
}

double StudentTDist::pdf(double x) const { return std::exp(logpdf(x)); }

double StudentTDist::logpdf(double x) const {
  const double t = (x - a_);
  return log_norm_ - 0.5 * (c_ + 1.0) * std::log1p(t * t / (b_ * c_));
}

Moments StudentTDist::moments() const {
  if (!(c_ > 2.0)) {
    throw Error(ErrorKind::MomentUndefined, "student t variance requires c > 2");
  }
  return {a_, b_ * c_ / (c_ - 2.0)};
}

double StudentTDist::mean() const {
  if (!(c_ > 1.0)) {
    throw Error(ErrorKind::MomentUndefined, "student t mean requires c > 1");
  }
  return a_;
}

// ---------------------------------------------------------------- mixture

GaussianMixture::GaussianMixture(std::vector<double> mu, std::vector<double> sigma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (mu_.empty()) throw Error(ErrorKind::EmptyDraws, "mixture needs at least one component");
  if (mu_.size() != sigma_.size()) {
    throw Error(ErrorKind::InvalidArgument, "mixture means and scales differ in length");
  }
  const double m = static_cast<double>(mu_.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    require_finite(mu_[i], "mixture mu");
    require_positive_scale(sigma_[i], "mixture sigma");
    mean += mu_[i];
  }
  mean /= m;
  double var = 0.0;
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    const double d = mu_[i] - mean;
    var += sigma_[i] * sigma_[i] + d * d;
  }
  moments_ = {mean, var / m};
  erfc_scale_.resize(sigma_.size());
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    erfc_scale_[i] = 1.0 / (sigma_[i] * std::numbers::sqrt2);
  }
}

GaussianMixture GaussianMixture::with_common_scale(std::vector<double> mu, double sigma) {
  std::vector<double> s(mu.size(), sigma);
  return GaussianMixture(std::move(mu), std::move(s));
}

double GaussianMixture::cdf(double x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_.size(); ++i) acc += std::erfc((mu_[i] - x) * erfc_scale_[i]);
  return 0.5 * acc / static_cast<double>(mu_.size());
}

double GaussianMixture::pdf(double x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    acc += normal_pdf((x - mu_[i]) / sigma_[i]) / sigma_[i];
  }
  return acc / static_cast<double>(mu_.size());
}

double GaussianMixture::logpdf(double x) const {
  const double direct = pdf(x);
  if (direct > 1e-280) return std::log(direct);
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    const double z = (x - mu_[i]) / sigma_[i];
    max_term = std::max(max_term, -0.5 * z * z - std::log(sigma_[i]));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    const double z = (x - mu_[i]) / sigma_[i];
    acc += std::exp(-0.5 * z * z - std::log(sigma_[i]) - max_term);
  }
  return max_term + std::log(acc) - kLogSqrt2Pi - std::log(static_cast<double>(mu_.size()));
}

// ---------------------------------------------------------------- empirical

EmpiricalDist::EmpiricalDist(std::vector<double> sample) : sorted_(std::move(sample)) {
  if (sorted_.empty()) throw Error(ErrorKind::EmptyDraws, "empirical distribution needs draws");
  for (double v : sorted_) require_finite(v, "sample value");
  // Moments in input order, bit-identical to fit_ga on the same sample.
  moments_ = sample_moments(sorted_);
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDist::cdf(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

// ---------------------------------------------------------------- dispatch

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

double cdf(const PredictiveDistribution& dist, double x) {
  return std::visit([x](const auto& d) { return d.cdf(x); }, dist);
}

double pdf(const PredictiveDistribution& dist, double x) {
  return std::visit(overloaded{
                        [](const EmpiricalDist&) -> double {
                          throw Error(ErrorKind::NoDensity,
                                      "empirical distribution has no density");
                        },
                        [x](const auto& d) { return d.pdf(x); },
                    },
                    dist);
}

double logpdf(const PredictiveDistribution& dist, double x) {
  return std::visit(overloaded{
                        [](const EmpiricalDist&) -> double {
                          throw Error(ErrorKind::NoDensity,
                                      "empirical distribution has no density");
                        },
                        [x](const auto& d) { return d.logpdf(x); },
                    },
                    dist);
}

Moments moments(const PredictiveDistribution& dist) {
  return std::visit([](const auto& d) { return d.moments(); }, dist);
}

double mean(const PredictiveDistribution& dist) {
  return std::visit(overloaded{
                        [](const StudentTDist& d) { return d.mean(); },
                        [](const auto& d) { return d.moments().mean; },
                    },
                    dist);
}

bool has_density(const PredictiveDistribution& dist) noexcept {
  return !std::holds_alternative<EmpiricalDist>(dist);
}

PredictiveDistribution shift(const PredictiveDistribution& dist, double c) {
  return std::visit(
      overloaded{
          [c](const GaussianDist& d) -> PredictiveDistribution {
            return GaussianDist(d.mu() + c, d.sigma());
          },
          [c](const StudentTDist& d) -> PredictiveDistribution {
            return StudentTDist(d.location() + c, d.scale_sq(), d.dof());
          },
          [c](const GaussianMixture& d) -> PredictiveDistribution {
            std::vector<double> mu(d.means().begin(), d.means().end());
            for (double& v : mu) v += c;
            return GaussianMixture(std::move(mu),
                                   std::vector<double>(d.scales().begin(), d.scales().end()));
          },
          [c](const EmpiricalDist& d) -> PredictiveDistribution {
            std::vector<double> x(d.sorted().begin(), d.sorted().end());
            for (double& v : x) v += c;
            return EmpiricalDist(std::move(x));
          },
      },
      dist);
}

double spread(const PredictiveDistribution& dist) noexcept {
  double s = 1.0;
  std::visit(overloaded{
                 [&](const StudentTDist& d) { s = std::sqrt(d.scale_sq()); },
                 [&](const auto& d) { s = std::sqrt(d.moments().variance); },
             },
             dist);
  return (std::isfinite(s) && s > 0.0) ? s : 1.0;
}

}  // namespace mcscore
