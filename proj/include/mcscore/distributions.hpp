#pragma once

#include <span>
#include <variant>
#include <vector>

namespace mcscore {

struct Moments {
  double mean;
  double variance;
};

/// Two-pass mean and variance with the m - 1 denominator (variance 0 when
/// m == 1). The single moment estimator used by every sample-based method.
Moments sample_moments(std::span<const double> sample);

/// Normal law N(mu, sigma^2). Also the Gaussian approximation of a sample.
class GaussianDist {
 public:
  GaussianDist(double mu, double sigma);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }

  double cdf(double x) const;
  double pdf(double x) const;
  double logpdf(double x) const;
  Moments moments() const noexcept { return {mu_, sigma_ * sigma_}; }

 private:
  double mu_;
  double sigma_;
};

/// Location-scale Student t: (Z - a) / sqrt(b) is standard t with c degrees
/// of freedom. Note that b is the squared scale, not the variance.
class StudentTDist {
 public:
  StudentTDist(double a, double b, double c);

  double location() const noexcept { return a_; }
  double scale_sq() const noexcept { return b_; }
  double dof() const noexcept { return c_; }

  double cdf(double x) const;
  double pdf(double x) const;
  double logpdf(double x) const;
  /// Throws MomentUndefined unless c > 2.
  Moments moments() const;
  /// Throws MomentUndefined unless c > 1.
  double mean() const;

 private:
  double a_;
  double b_;
  double c_;
  double log_norm_;
};

/// Equal-weight mixture of normals. Houses both the mixture-of-parameters
/// estimate and the Gaussian-kernel density estimate (common scale).
class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> mu, std::vector<double> sigma);
  static GaussianMixture with_common_scale(std::vector<double> mu, double sigma);

  std::size_t size() const noexcept { return mu_.size(); }
  std::span<const double> means() const noexcept { return mu_; }
  std::span<const double> scales() const noexcept { return sigma_; }

  double cdf(double x) const;
  double pdf(double x) const;
  double logpdf(double x) const;
  Moments moments() const noexcept { return moments_; }

 private:
  std::vector<double> mu_;
  std::vector<double> sigma_;
  std::vector<double> erfc_scale_;  // 1 / (sigma sqrt 2)
  Moments moments_{};
};

/// Empirical distribution of a sample, stored sorted ascending. Moments use
/// the m - 1 variance denominator shared with the Gaussian approximation.
class EmpiricalDist {
 public:
  explicit EmpiricalDist(std::vector<double> sample);

  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }

  /// (1/m) #{X_i <= x}; right-continuous.
  double cdf(double x) const;
  /// Variance is 0 for a single draw.
  Moments moments() const noexcept { return moments_; }

 private:
  std::vector<double> sorted_;
  Moments moments_{};
};

using PredictiveDistribution =
    std::variant<GaussianDist, StudentTDist, GaussianMixture, EmpiricalDist>;

double cdf(const PredictiveDistribution& dist, double x);
/// Throws NoDensity for EmpiricalDist.
double pdf(const PredictiveDistribution& dist, double x);
/// Log density evaluated without underflow (log-sum-exp for mixtures).
double logpdf(const PredictiveDistribution& dist, double x);
/// Throws MomentUndefined for Student t with c <= 2.
Moments moments(const PredictiveDistribution& dist);
/// Throws MomentUndefined when the mean does not exist.
double mean(const PredictiveDistribution& dist);
bool has_density(const PredictiveDistribution& dist) noexcept;
/// Translate by c: the law of Z + c.
PredictiveDistribution shift(const PredictiveDistribution& dist, double c);
/// Rough spread used to scale quadrature maps; never zero.
double spread(const PredictiveDistribution& dist) noexcept;

}  // namespace mcscore
