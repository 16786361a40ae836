#include "tscale/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tscale/coefficients.hpp"
#include "tscale/detail/search.hpp"

namespace tscale {
namespace {

constexpr double kLowerBracket = 1e-6;
constexpr double kGoldenTol = 1e-10;
constexpr double kAlphaResidual = 1e-10;

double psi(double x) {
  return x * std::sqrt(2.0 / std::numbers::pi) * std::exp(-x * x / 8.0) -
         x * x * normal_cdf(-0.5 * x);
}

double psi_dx(double x) {
  return std::sqrt(2.0 / std::numbers::pi) * std::exp(-x * x / 8.0) -
         2.0 * x * normal_cdf(-0.5 * x);
}

// Golden section is limited to ~sqrt(eps) relative accuracy near a smooth
// maximum; the root of the closed-form derivative is located to a few ulp.
template <class Dx>
double polish_maximizer(Dx&& dx, double x, bool* ok) {
  const double width = 1e-4 * std::max(1.0, x);
  const double lo = std::max(x - width, 0.5 * x);
  const double hi = x + width;
  if (!(dx(lo) > 0.0 && dx(hi) < 0.0)) {
    *ok = false;
    return x;
  }
  *ok = true;
  return detail::bisect(dx, lo, hi).x;
}

}  // namespace

NonPositiveCurvature::NonPositiveCurvature(double b)
    : DomainError("b = E[V''] = " + std::to_string(b) +
                  " <= 0: no finite optimal step scale; ell should be chosen as "
                  "large as possible to leave the concave region"),
      b_(b) {}

double asymptotic_star_ratio() {
  static const double x_star = [] {
    const auto coarse = detail::golden_section_maximize(psi, 1e-6, 10.0, 1e-12);
    bool ok = false;
    return polish_maximizer(psi_dx, coarse.x, &ok);
  }();
  return x_star;
}

double star_bracket_upper(double s) {
  return std::max(6.0, 3.0 * asymptotic_star_ratio() * std::sqrt(s));
}

TuningResult ell_star(double s) {
  detail::require(s >= 0.0 && std::isfinite(s), "ell_star: s must be finite and >= 0");
  auto objective = [s](double ell) { return entropy_rate_unit(s, ell); };
  const auto coarse = detail::golden_section_maximize(objective, kLowerBracket,
                                                      star_bracket_upper(s), kGoldenTol);
  bool polished = false;
  const double ell = polish_maximizer(
      [s](double l) { return entropy_rate_unit_dl(s, l); }, coarse.x, &polished);
  return {ell, entropy_rate_unit(s, ell), coarse.iterations, polished};
}

TuningResult ell_star_ab(double a, double b) {
  detail::require(a >= 0.0 && std::isfinite(a), "ell_star_ab: a must be finite and >= 0");
  if (!(b > 0.0)) throw NonPositiveCurvature(b);
  auto reduced = ell_star(a / b);
  const double root_b = std::sqrt(b);
  reduced.ell /= root_b;
  reduced.objective /= b;  // F(a, b, l) = F1(a/b, l sqrt b) / b
  return reduced;
}

TuningResult ell_alpha(double s, Probability alpha) {
  detail::require(s > 0.0 && std::isfinite(s), "ell_alpha: s must be positive");
  const double target = alpha.value();
  detail::require(target > 0.0 && target < 1.0, "ell_alpha: alpha must lie in (0, 1)");

  double lo = 1e-9;
  double hi = 1.0;
  int expansions = 0;
  while (acceptance_curve(s, hi) >= target) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 1100) throw ConvergenceError("ell_alpha: failed to bracket root");
  }
  const auto root = detail::bisect(
      [s, target](double ell) { return acceptance_curve(s, ell) - target; }, lo, hi);
  const double achieved = acceptance_curve(s, root.x);
  return {root.x, achieved, root.iterations + expansions,
          std::abs(achieved - target) <= kAlphaResidual};
}

TuningResult ell_alpha_ab(double a, double b, Probability alpha) {
  detail::require(a >= 0.0 && std::isfinite(a), "ell_alpha_ab: a must be finite and >= 0");
  if (!(b > 0.0)) throw NonPositiveCurvature(b);
  const double target = alpha.value();
  detail::require(target > 0.0 && target < 1.0, "ell_alpha_ab: alpha must lie in (0, 1)");
  if (a == 0.0) {
    // acceptance_rate(0, b, l) = exp(-l^2 b / 2)
    const double ell = std::sqrt(-2.0 * std::log(target) / b);
    return {ell, acceptance_rate(0.0, b, ell), 0, true};
  }
  auto reduced = ell_alpha(a / b, alpha);
  reduced.ell /= std::sqrt(b);
  return reduced;
}

double matched_alpha(MatchRegime regime) {
  switch (regime) {
    case MatchRegime::near_equilibrium:
      return acceptance_curve(1.0, ell_star(1.0).ell);
    case MatchRegime::s_to_zero: {
      const double l0 = ell_star(0.0).ell;
      return std::exp(-0.5 * l0 * l0);
    }
    case MatchRegime::s_to_infinity:
      return normal_cdf(-0.5 * asymptotic_star_ratio());
  }
  throw DomainError("matched_alpha: unknown regime");
}

MatchRegime parse_match_regime(std::string_view name) {
  if (name == "near_equilibrium") return MatchRegime::near_equilibrium;
  if (name == "s_to_zero") return MatchRegime::s_to_zero;
  if (name == "s_to_infinity") return MatchRegime::s_to_infinity;
  throw DomainError("unknown regime '" + std::string(name) +
                    "' (expected near_equilibrium, s_to_zero or s_to_infinity)");
}

double gaussian_entropy_derivative(double m, double s, double ell) {
  const double variance = s - m * m;
  detail::require(variance > 0.0, "gaussian entropy derivative requires s > m^2");
  const double ds = entropy_rate_unit(s, ell) * (1.0 - s);
  const double drift = drift_coefficient(s, 1.0, ell);
  return ds - (ds + 2.0 * m * m * drift) / variance;
}

TuningResult ell_ent_gaussian(double m, double s) {
  detail::require(std::isfinite(m) && std::isfinite(s), "ell_ent_gaussian: non-finite moments");
  detail::require(s - m * m > 0.0, "ell_ent_gaussian requires s > m^2");
  if (m == 0.0 && s == 1.0) {
    auto star = ell_star(1.0);
    star.objective = 0.0;
    return star;
  }
  const double upper = std::max(12.0, star_bracket_upper(s));
  const auto grid = detail::geometric_grid(1e-3, upper, 160);
  const auto best = detail::scan_then_maximize(
      [m, s](double ell) { return -gaussian_entropy_derivative(m, s, ell); }, grid, 1e-10);
  return {best.x, -best.value, best.iterations, true};
}

TuningResult ell_max_diffusion(double s) {
  detail::require(s >= 0.0 && std::isfinite(s), "ell_max_diffusion: s must be finite and >= 0");
  const double upper = std::max(12.0, 6.0 * std::sqrt(s));
  const auto grid = detail::geometric_grid(1e-3, upper, 400);
  const auto best = detail::scan_then_maximize(
      [s](double ell) { return diffusion_coefficient(s, 1.0, ell); }, grid, 1e-11);
  return {best.x, best.value, best.iterations, true};
}

}  // namespace tscale
