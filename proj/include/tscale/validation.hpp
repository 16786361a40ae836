#pragma once

// Self-checks shared by the `validate` subcommand and the test suites: a
// Monte Carlo oracle for the limiting coefficients and deterministic identity
// sweeps over parameter grids.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tscale {

/// Monte Carlo estimates with Z ~ N(-l^2 b / 2, l^2 a):
///   Gamma = l^2 E[exp(Z) ^ 1],  G = l^2 E[exp(Z) 1{Z < 0}].
struct OracleEstimate {
  double gamma;
  double gamma_se;
  double drift;
  double drift_se;
};

OracleEstimate coefficient_oracle(double a, double b, double ell, std::uint64_t samples,
                                  std::uint64_t seed);

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Gamma(c,c,l) = 2 G(c,c,l) on a 20 x 20 grid, to 1e-12 relative.
CheckResult check_equilibrium_identity();
/// sign(Gamma - 2 G) = sign(a - b) on a 10 x 10 x 10 grid off the diagonal.
CheckResult check_sign_identity();
/// F(a, b, l) > 0 on [0, 10] x [-10, 10] for l in {0.5, 1, 2, 4}.
CheckResult check_rate_positivity();
/// Successive differences of l -> F1(s, l) change sign exactly once on a
/// 1000-point geometric grid, for 8 values of s.
CheckResult check_unimodality();
/// Oracle agreement within `z_tol` standard errors at `points` random
/// (a, b, l) triples.
CheckResult check_oracle(std::uint64_t samples, std::uint64_t seed, std::size_t points = 20,
                         double z_tol = 4.0);
/// Tuning constants: l*(0) = sqrt 2, l*(1) ~ 1.85, l^0.234(1) ~ 2.38 and the
/// three matched acceptance rates.
std::vector<CheckResult> check_tuning_constants();

/// Everything above; the oracle uses `samples` draws per triple.
std::vector<CheckResult> run_validation_suite(std::uint64_t samples, std::uint64_t seed);

/// One "PASS name: detail" / "FAIL name: detail" line per check. Returns
/// true when all passed.
bool print_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace tscale
