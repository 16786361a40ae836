#pragma once

// Step-scale selection rules for the proposal variance l^2/n.
//
//   ell_star      maximizes the entropy production rate F1(s, .)
//   ell_alpha     solves J(s, l) = alpha (constant mean acceptance rate)
//   ell_ent       minimizes d/dt of the Gaussian relative entropy
//
// The *_ab variants work in the unreduced moments (a, b) through the
// scaling relations l~(a, b) = l(a/b) / sqrt(b), valid for b > 0.

#include <string_view>

#include "tscale/error.hpp"
#include "tscale/special.hpp"

namespace tscale {

struct TuningResult {
  double ell = 0.0;
  double objective = 0.0;  ///< value of the optimized function / residual target
  int iterations = 0;
  bool converged = false;
};

/// Raised when b = E[V''] <= 0. No finite optimal scale exists in that
/// regime; the step scale should be taken as large as possible, which is
/// left to the caller (see Strategy::ell_cap).
class NonPositiveCurvature : public DomainError {
 public:
  explicit NonPositiveCurvature(double b);
  [[nodiscard]] double b() const noexcept { return b_; }

 private:
  double b_;
};

/// x* = argmax of psi(x) = x sqrt(2/pi) e^{-x^2/8} - x^2 Phi(-x/2), the limit of
/// ell_star(s)/sqrt(s) as s -> infinity. Computed once and cached.
double asymptotic_star_ratio();

/// Upper end of the search bracket for ell_star(s): max(6, 3 x* sqrt(s)).
double star_bracket_upper(double s);

/// Unique maximizer of l -> F1(s, l), s >= 0.
TuningResult ell_star(double s);

/// argmax_l F(a, b, l) = ell_star(a/b) / sqrt(b). Throws NonPositiveCurvature for b <= 0.
TuningResult ell_star_ab(double a, double b);

/// Unique root of J(s, l) = alpha for s > 0, alpha in (0, 1).
TuningResult ell_alpha(double s, Probability alpha);

/// Root of acceptance_rate(a, b, l) = alpha: ell_alpha(a/b, alpha) / sqrt(b).
/// a = 0 is accepted and solved in closed form, l = sqrt(-2 ln(alpha) / b).
/// Throws NonPositiveCurvature for b <= 0.
TuningResult ell_alpha_ab(double a, double b, Probability alpha);

enum class MatchRegime { near_equilibrium, s_to_zero, s_to_infinity };

/// Acceptance rate alpha at which the constant-acceptance rule coincides
/// with the rate-optimal rule in the given regime.
double matched_alpha(MatchRegime regime);

MatchRegime parse_match_regime(std::string_view name);

/// Twice the time derivative of the Gaussian relative entropy as a function
/// of l, for mean m and second moment s:
///   F1(s,l)(1-s) - (F1(s,l)(1-s) + 2 m^2 G(s,1,l)) / (s - m^2).
double gaussian_entropy_derivative(double m, double s, double ell);

/// Minimizer of gaussian_entropy_derivative over l in (0, max(12, 3 x* sqrt s)].
/// At the equilibrium point (m, s) = (0, 1) the objective vanishes for every l
/// and ell_star(1) is returned by convention. Throws DomainError if s <= m^2.
TuningResult ell_ent_gaussian(double m, double s);

/// argmax_l Gamma(s, 1, l): the limit of ell_ent_gaussian as the variance
/// s - m^2 tends to zero (Dirac initial laws).
TuningResult ell_max_diffusion(double s);

}  // namespace tscale
