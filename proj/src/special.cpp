#include "tscale/special.hpp"

#include <array>
#include <limits>

namespace tscale {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

// exp(x^2) with x^2 split into an exactly representable head and a small
// tail, so the rounding of x^2 does not get amplified by exp.
double exp_square(double x) {
  const double head = std::floor(x * 4096.0) / 4096.0;
  const double tail = (x - head) * (x + head);
  return std::exp(head * head) * std::exp(tail);
}

// Asymptotic expansion of erfcx for large positive x. Nine terms give a
// relative truncation error below 1e-20 for x >= 26.
double erfcx_asymptotic(double x) {
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 9; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
  }
  return sum * kInvSqrtPi / x;
}

}  // namespace

double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / kSqrt2);
}

double erfcx(double x) noexcept {
  if (x >= 26.0) return erfcx_asymptotic(x);
  if (x >= 0.0) return exp_square(x) * std::erfc(x);
  if (x < -26.5) return std::numeric_limits<double>::infinity();
  // erfc(x) = 2 - erfc(-x)
  return 2.0 * exp_square(x) - erfcx(-x);
}

double normal_quantile(double p) {
  detail::require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0, 1)");

  // Acklam's rational approximation, relative error about 1e-9.
  static constexpr std::array<double, 6> a{
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step; the residual is taken on the smaller tail.
  const double residual =
      p <= 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
  const double u = residual / normal_pdf(x);
  return x - u / (1.0 + 0.5 * x * u);
}

double exp_scaled_cdf(double x) noexcept {
  if (x > kScaledCdfOverflow) return std::numeric_limits<double>::infinity();
  if (x < 0.0) return 0.5 * erfcx(-x / kSqrt2);
  return std::exp(0.5 * x * x) * normal_cdf(x);
}

double x_exp_scaled_cdf(double x) noexcept {
  if (x > kScaledCdfOverflow) return std::numeric_limits<double>::infinity();
  return x * exp_scaled_cdf(x);
}

MillsBounds mills_bounds(double x) {
  detail::require(x < 0.0, "mills_bounds: x must be negative");
  const double density = normal_pdf(x);
  return {-x / (1.0 + x * x) * density, -density / x};
}

}  // namespace tscale
