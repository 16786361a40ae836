#pragma once

// One-dimensional target potentials V for product densities
// p(x) = prod_i exp(-V(x_i)), and the moment functionals of a law on R that
// feed the limiting coefficients.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tscale {

using ScalarFn = std::function<double(double)>;

struct PotentialFunctions {
  ScalarFn v;
  ScalarFn d1;
  ScalarFn d2;
  ScalarFn d3;
  ScalarFn d4;
};

class Potential {
 public:
  /// V(x) = x^2/2 + ln(2 pi)/2.
  static Potential gaussian();

  /// Piecewise double well, (x-1)^2 (x+1)^2 on |x| <= 1 and 4x^2 - 8|x| + 4
  /// outside, shifted by a numerically fitted constant so that
  /// int exp(-V) = 1. V''' and V'''' jump at |x| = 1.
  static Potential double_well();

  /// User-supplied potential, known up to an additive constant which is
  /// fitted by quadrature. Unless `trusted`, the derivatives are checked
  /// against centered differences of V away from `kinks`, and the stationary
  /// Fisher information is computed. Throws DomainError on failed checks.
  static Potential custom(std::string name, PotentialFunctions fns, int smoothness_order,
                          std::vector<double> kinks = {}, bool trusted = false);

  /// Built-in lookup by id: "gaussian" or "double-well".
  static Potential by_name(std::string_view id);

  [[nodiscard]] double v(double x) const { return fns_.v(x) + shift_; }
  [[nodiscard]] double d1(double x) const { return fns_.d1(x); }
  [[nodiscard]] double d2(double x) const { return fns_.d2(x); }
  [[nodiscard]] double d3(double x) const { return fns_.d3(x); }
  [[nodiscard]] double d4(double x) const { return fns_.d4(x); }

  /// (V')^2 V'' + V'''' - 2 V''' V' - (V'')^2; its mean decides the MALA regime.
  [[nodiscard]] double mala_integrand(double x) const;

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] int smoothness_order() const noexcept { return smoothness_order_; }
  /// Additive constant added to the user-supplied V.
  [[nodiscard]] double shift() const noexcept { return shift_; }
  /// Stationary I = int (V')^2 e^{-V}; NaN for trusted custom potentials.
  [[nodiscard]] double fisher_information() const noexcept { return fisher_; }
  /// Points where some derivative up to order 4 is discontinuous.
  [[nodiscard]] std::span<const double> kinks() const noexcept { return kinks_; }

 private:
  Potential() = default;
  void normalize();

  std::string name_;
  PotentialFunctions fns_;
  int smoothness_order_ = 0;
  double shift_ = 0.0;
  double fisher_ = 0.0;
  std::vector<double> kinks_;
};

/// Moments of a law on R against a potential.
struct MomentFunctionals {
  double a = 0.0;         ///< E[(V')^2]
  double b = 0.0;         ///< E[V'']
  double i_fisher = 0.0;  ///< stationary Fisher information of the target (metadata)
  double mala_m4 = 0.0;   ///< E[(V')^2 V'' + V'''' - 2 V''' V' - (V'')^2], point masses at kinks included
};

/// int_R g(x) dx by adaptive Gauss-Kronrod on panels split at `breaks`,
/// with semi-infinite end panels. Throws ConvergenceError when the error
/// estimate exceeds `abs_tol` plus a relative slack.
double integrate_line(const ScalarFn& g, std::span<const double> breaks, double abs_tol = 1e-10);

/// E[g(X)] for X with density exp(-V).
double stationary_expectation(const Potential& p, const ScalarFn& g);

/// Moments under the stationary law exp(-V) by quadrature.
MomentFunctionals stationary_moments(const Potential& p);

/// Sample averages over xs. Throws DomainError for an empty sample.
MomentFunctionals empirical_moments(const Potential& p, std::span<const double> xs);

/// Mean and second moment of the stationary law (equilibrium reference values).
struct EquilibriumValues {
  double mean;
  double second_moment;
};
EquilibriumValues equilibrium_values(const Potential& p);

}  // namespace tscale
