#include "mcscore/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "mcscore/error.hpp"

namespace mcscore {

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "quadrature tolerances must be positive");
  }
  if (max_subdivisions <= 0) {
    throw Error(ErrorKind::InvalidArgument, "quadrature max_subdivisions must be positive");
  }
}

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208606327236, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Piece {
  std::size_t segment;
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

class Integrand {
 public:
  Integrand(const std::function<double(double)>& f, std::span<const Segment> segments)
      : f_(f), segments_(segments) {}

  // Value of the (mapped) integrand at parameter u of segment s.
  double operator()(std::size_t s, double u) const {
    const Segment& seg = segments_[s];
    switch (seg.kind) {
      case Segment::Kind::Finite:
        return f_(u);
      case Segment::Kind::ToMinusInfinity: {
        const double jac = seg.scale / (u * u);
        return f_(seg.lo - seg.scale * (1.0 - u) / u) * jac;
      }
      case Segment::Kind::ToPlusInfinity: {
        const double jac = seg.scale / (u * u);
        return f_(seg.lo + seg.scale * (1.0 - u) / u) * jac;
      }
    }
    return 0.0;
  }

 private:
  const std::function<double(double)>& f_;
  std::span<const Segment> segments_;
};

Piece gauss_kronrod(const Integrand& g, std::size_t s, double a, double b, int& evals) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  const double fc = g(s, centr);
  double resg = 0.0;
  double resk = kWgk[10] * fc;
  double resabs = std::abs(resk);
  std::array<double, 10> fv1{};
  std::array<double, 10> fv2{};
  for (int j = 0; j < 10; ++j) {
    const double absc = hlgth * kXgk[j];
    const double f1 = g(s, centr - absc);
    const double f2 = g(s, centr + absc);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  evals += 21;

  const double reskh = resk * 0.5;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }
  const double result = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0) {
    abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    abserr = std::max(kEps * 50.0 * resabs, abserr);
  }
  if (!std::isfinite(result) || !std::isfinite(abserr)) {
    throw Error(ErrorKind::QuadratureFailure, "non-finite integrand value");
  }
  return {s, a, b, result, abserr};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const Segment> segments,
                           const QuadratureSettings& settings) {
  settings.validate();
  Integrand g(f, segments);
  QuadratureResult out;
  std::priority_queue<Piece> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    double a = 0.0;
    double b = 1.0;
    if (segments[s].kind == Segment::Kind::Finite) {
      a = segments[s].lo;
      b = segments[s].hi;
      if (!(b > a)) continue;
    }
    Piece p = gauss_kronrod(g, s, a, b, out.evaluations);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  // Pieces that cannot be bisected further keep their error in `frozen_err`.
  double frozen_err = 0.0;
  std::vector<Piece> frozen;
  while (!heap.empty()) {
    const double target = std::max(settings.abs_tol, settings.rel_tol * std::abs(total));
    if (total_err <= target) break;
    if (out.subdivisions >= settings.max_subdivisions) {
      throw Error(ErrorKind::QuadratureFailure,
                  "subdivision limit reached with error estimate " + std::to_string(total_err));
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        std::abs(worst.b - worst.a) <= 1e3 * kEps * std::max(1.0, std::abs(mid))) {
      frozen_err += worst.error;
      frozen.push_back(worst);
      if (frozen_err > target) {
        throw Error(ErrorKind::QuadratureFailure, "integrand not resolvable at the tolerance");
      }
      continue;
    }
    const Piece left = gauss_kronrod(g, worst.segment, worst.a, mid, out.evaluations);
    const Piece right = gauss_kronrod(g, worst.segment, mid, worst.b, out.evaluations);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++out.subdivisions;
  }

  // Re-sum to shed drift from the incremental updates.
  double sum = 0.0;
  double err = frozen_err;
  for (const Piece& p : frozen) sum += p.value;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = err;
  return out;
}

std::vector<Segment> real_line_segments(std::span<const double> cuts, double scale) {
  std::vector<Segment> segs;
  if (cuts.empty()) {
    segs.push_back(Segment::below(0.0, scale));
    segs.push_back(Segment::above(0.0, scale));
    return segs;
  }
  segs.reserve(cuts.size() + 1);
  segs.push_back(Segment::below(cuts.front(), scale));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) segs.push_back(Segment::finite(cuts[i], cuts[i + 1]));
  }
  segs.push_back(Segment::above(cuts.back(), scale));
  return segs;
}

}  // namespace mcscore
