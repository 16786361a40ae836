#pragma once

// Normal-distribution special functions used throughout the library.
//
// The cumulative distribution function is built on the C library's erfc,
// which is accurate to a few ulp across the real line. The scaled
// complementary error function erfcx(x) = exp(x^2) erfc(x) is provided so
// that products of the form exp(y^2/2) Phi(y) can be evaluated without
// overflow or underflow for large |y|.

#include <cmath>
#include <numbers>

#include "tscale/error.hpp"

namespace tscale {

/// A value in [0, 1]. Construction from an out-of-range value throws.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value) : value_(value) {
    detail::require(value >= 0.0 && value <= 1.0,
                    "probability must lie in [0, 1]");
  }

  [[nodiscard]] constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

/// Standard normal density.
inline double normal_pdf(double x) noexcept {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Standard normal CDF, Phi(x).
double normal_cdf(double x) noexcept;

/// Inverse of the standard normal CDF. Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

/// exp(x^2) erfc(x), finite for every x > -26.
double erfcx(double x) noexcept;

/// Largest argument for which exp_scaled_cdf returns a finite value; above
/// it the result saturates to +infinity.
inline constexpr double kScaledCdfOverflow = 35.0;

/// f(x) = exp(x^2/2) Phi(x). Strictly increasing; +infinity for x > 35.
double exp_scaled_cdf(double x) noexcept;

/// h(x) = x exp(x^2/2) Phi(x). Strictly increasing; +infinity for x > 35.
double x_exp_scaled_cdf(double x) noexcept;

/// Two-sided Mill's-ratio bounds valid for x < 0:
///   -x/(sqrt(2 pi)(1+x^2)) e^{-x^2/2} < Phi(x) < -1/(x sqrt(2 pi)) e^{-x^2/2}.
struct MillsBounds {
  double lower;
  double upper;
};
MillsBounds mills_bounds(double x);

}  // namespace tscale
