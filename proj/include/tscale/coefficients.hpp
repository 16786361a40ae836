#pragma once

// Coefficients of the transient diffusion limit of random walk Metropolis.
//
// With a = E[(V'(X))^2] and b = E[V''(X)] taken under the current marginal
// law and proposal variance l^2/n, the limiting process is
//
//   dX = sqrt(Gamma(a, b, l)) dB - G(a, b, l) V'(X) dt
//
// and the limiting mean acceptance rate is Gamma(a, b, l) / l^2. The entropy
// production rate is governed by
//
//   F(a, b, l) = (b Gamma - 2 a G) / (b - a)      for a != b,
//
// extended continuously to the diagonal. All functions here are pure.

#include "tscale/special.hpp"

namespace tscale {

/// The moment a = E[(V')^2]: a nonnegative real or the distinguished value
/// +infinity. Infinity must be requested explicitly through infinite(); a
/// floating-point infinity passed to the constructor is rejected.
class GradMoment {
 public:
  GradMoment(double value);  // NOLINT(google-explicit-constructor)

  static GradMoment infinite() noexcept {
    GradMoment m;
    m.infinite_ = true;
    return m;
  }

  [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
  [[nodiscard]] bool is_zero() const noexcept { return !infinite_ && value_ == 0.0; }
  /// Finite value; +infinity when is_infinite().
  [[nodiscard]] double value() const noexcept;

 private:
  GradMoment() = default;
  double value_ = 0.0;
  bool infinite_ = false;
};

/// The pair (E[(V')^2], E[V'']) that drives every limiting coefficient.
struct MomentPair {
  GradMoment a;
  double b;
};

/// Limiting diffusion coefficient Gamma(a, b, l), in (0, l^2].
double diffusion_coefficient(GradMoment a, double b, double ell);

/// Limiting drift coefficient G(a, b, l), in [0, Gamma(a, b, l)].
double drift_coefficient(GradMoment a, double b, double ell);

/// Limiting mean acceptance rate Gamma(a, b, l) / l^2, in (0, 1].
double acceptance_rate(GradMoment a, double b, double ell);

/// Relative distance below which entropy_rate switches to the closed form
/// valid on the diagonal a = b.
inline constexpr double kDiagonalSwitch = 1e-7;

/// Entropy production rate F(a, b, l) for finite a >= 0. Continuous across
/// a = b and strictly positive on compacts.
double entropy_rate(double a, double b, double ell);

/// F1(s, l) = F(s, 1, l), evaluated from its own closed form. For b > 0,
/// F(a, b, l) = F1(a/b, l sqrt(b)) / b.
double entropy_rate_unit(double s, double ell);

/// d F1(s, l) / d l, closed form. Used to polish maximizers of F1.
double entropy_rate_unit_dl(double s, double ell);

/// J(s, l) = Phi(-l / (2 sqrt s)) + e^{l^2 (s-1)/2} Phi(l (1/(2 sqrt s) - sqrt s)).
/// The limiting acceptance rate written in the reduced variables
/// s = a/b, l sqrt(b); strictly decreasing in l with J(s, 0) = 1.
double acceptance_curve(double s, double ell);

}  // namespace tscale
