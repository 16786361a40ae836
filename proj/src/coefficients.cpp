#include "tscale/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tscale {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024157652848110453;

void require_ell(double ell) {
  detail::require(ell > 0.0 && std::isfinite(ell), "step scale ell must be positive");
}

// exp(l^2 (a - b)/2) Phi(l (b/(2 sqrt a) - sqrt a)) for finite a > 0.
//
// With y = l (b/(2 sqrt a) - sqrt a) the exponent satisfies
// l^2 (a - b)/2 = y^2/2 - l^2 b^2/(8a), so for y < 0 the product equals
// exp(-l^2 b^2/(8a)) f(y) with f(y) = exp(y^2/2) Phi(y) = erfcx(-y/sqrt2)/2,
// which never overflows. For y >= 0 we have b >= 2a, the exponent is
// nonpositive and the direct product is safe.
double tail_term(double a, double b, double ell) {
  const double root_a = std::sqrt(a);
  const double y = ell * (b / (2.0 * root_a) - root_a);
  if (y < 0.0) {
    return std::exp(-ell * ell * b * b / (8.0 * a)) * exp_scaled_cdf(y);
  }
  return std::exp(0.5 * ell * ell * (a - b)) * normal_cdf(y);
}

bool near_diagonal(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) < kDiagonalSwitch * scale;
}

// F(c, c, l).
double entropy_rate_diagonal(double c, double ell) {
  const double x = ell * std::sqrt(c);
  return 2.0 * ell * ell *
         ((1.0 + 0.25 * x * x) * normal_cdf(-0.5 * x) -
          x / (2.0 * kSqrt2Pi) * std::exp(-x * x / 8.0));
}

}  // namespace

GradMoment::GradMoment(double value) : value_(value) {
  detail::require(std::isfinite(value),
                  "moment a must be finite; use GradMoment::infinite()");
  detail::require(value >= 0.0, "moment a = E[(V')^2] must be nonnegative");
}

double GradMoment::value() const noexcept {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

double diffusion_coefficient(GradMoment a, double b, double ell) {
  require_ell(ell);
  detail::require(std::isfinite(b), "moment b must be finite");
  const double l2 = ell * ell;
  if (a.is_infinite()) return 0.5 * l2;
  if (a.is_zero()) return l2 * std::exp(-0.5 * l2 * std::max(b, 0.0));
  const double av = a.value();
  return l2 * (normal_cdf(-ell * b / (2.0 * std::sqrt(av))) + tail_term(av, b, ell));
}

double drift_coefficient(GradMoment a, double b, double ell) {
  require_ell(ell);
  detail::require(std::isfinite(b), "moment b must be finite");
  const double l2 = ell * ell;
  if (a.is_infinite()) return 0.0;
  if (a.is_zero()) return b > 0.0 ? l2 * std::exp(-0.5 * l2 * b) : 0.0;
  return l2 * tail_term(a.value(), b, ell);
}

double acceptance_rate(GradMoment a, double b, double ell) {
  return diffusion_coefficient(a, b, ell) / (ell * ell);
}

double entropy_rate(double a, double b, double ell) {
  require_ell(ell);
  detail::require(a >= 0.0 && std::isfinite(a), "entropy_rate: a must be finite and >= 0");
  detail::require(std::isfinite(b), "entropy_rate: b must be finite");
  if (near_diagonal(a, b)) return entropy_rate_diagonal(a, ell);
  const double gamma = diffusion_coefficient(a, b, ell);
  const double drift = drift_coefficient(a, b, ell);
  return (b * gamma - 2.0 * a * drift) / (b - a);
}

double entropy_rate_unit(double s, double ell) {
  require_ell(ell);
  detail::require(s >= 0.0 && std::isfinite(s), "entropy_rate_unit: s must be finite and >= 0");
  const double l2 = ell * ell;
  if (s == 0.0) return l2 * std::exp(-0.5 * l2);
  if (near_diagonal(s, 1.0)) return entropy_rate_diagonal(1.0, ell);
  const double head = normal_cdf(-ell / (2.0 * std::sqrt(s)));
  return l2 / (1.0 - s) * (head + (1.0 - 2.0 * s) * tail_term(s, 1.0, ell));
}

double entropy_rate_unit_dl(double s, double ell) {
  require_ell(ell);
  detail::require(s >= 0.0 && std::isfinite(s), "entropy_rate_unit_dl: s must be finite and >= 0");
  const double l2 = ell * ell;
  if (s == 0.0) return (2.0 * ell - l2 * ell) * std::exp(-0.5 * l2);
  if (near_diagonal(s, 1.0)) {
    const double p = normal_cdf(-0.5 * ell);
    const double q = normal_pdf(0.5 * ell);
    return p * (4.0 * ell + 2.0 * l2 * ell) - 4.0 * l2 * q;
  }
  const double root_s = std::sqrt(s);
  const double p = normal_cdf(-ell / (2.0 * root_s));
  const double q = normal_pdf(ell / (2.0 * root_s));
  const double t = tail_term(s, 1.0, ell);
  const double k = p + (1.0 - 2.0 * s) * t;
  return 2.0 * ell * k / (1.0 - s) - 2.0 * root_s * l2 * q - (1.0 - 2.0 * s) * l2 * ell * t;
}

double acceptance_curve(double s, double ell) {
  detail::require(s > 0.0 && std::isfinite(s), "acceptance_curve: s must be positive");
  detail::require(ell >= 0.0 && std::isfinite(ell), "acceptance_curve: ell must be >= 0");
  if (ell == 0.0) return 1.0;
  return normal_cdf(-ell / (2.0 * std::sqrt(s))) + tail_term(s, 1.0, ell);
}

}  // namespace tscale
