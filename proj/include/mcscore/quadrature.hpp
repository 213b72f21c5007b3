#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mcscore {

/// Tolerances for adaptive quadrature. Integration stops once the summed
/// error estimate is below max(abs_tol, rel_tol * |integral|).
struct QuadratureSettings {
  double rel_tol = 1e-6;
  double abs_tol = 1e-6;
  int max_subdivisions = 2000;

  void validate() const;
};

/// One integration range. Semi-infinite ranges are mapped onto (0, 1] via
/// z = anchor -/+ scale * (1 - t) / t.
struct Segment {
  enum class Kind { Finite, ToMinusInfinity, ToPlusInfinity };

  Kind kind = Kind::Finite;
  double lo = 0.0;      // Finite: lower end; otherwise the finite anchor
  double hi = 0.0;      // Finite: upper end
  double scale = 1.0;   // semi-infinite map scale

  static Segment finite(double lo, double hi) { return {Kind::Finite, lo, hi, 1.0}; }
  static Segment below(double anchor, double scale) {
    return {Kind::ToMinusInfinity, anchor, anchor, scale};
  }
  static Segment above(double anchor, double scale) {
    return {Kind::ToPlusInfinity, anchor, anchor, scale};
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod quadrature over the union of
/// `segments`, bisecting the interval with the largest error estimate.
/// Throws QuadratureFailure when the subdivision budget runs out.
QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const Segment> segments,
                           const QuadratureSettings& settings);

/// Segments covering the real line split at the sorted `cuts` (at least one).
std::vector<Segment> real_line_segments(std::span<const double> cuts, double scale);

}  // namespace mcscore
