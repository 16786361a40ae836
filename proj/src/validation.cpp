#include "tscale/validation.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "tscale/coefficients.hpp"
#include "tscale/detail/search.hpp"
#include "tscale/rng.hpp"
#include "tscale/tuning.hpp"

namespace tscale {
namespace {

std::string fmt(double x, int precision = 6) {
  std::ostringstream out;
  out << std::setprecision(precision) << x;
  return out.str();
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace

OracleEstimate coefficient_oracle(double a, double b, double ell, std::uint64_t samples,
                                  std::uint64_t seed) {
  detail::require(a >= 0.0 && std::isfinite(b) && ell > 0.0 && samples >= 2,
                  "coefficient_oracle: need a >= 0, finite b, ell > 0, samples >= 2");
  const CounterRng rng(seed);
  const double mu = -0.5 * ell * ell * b;
  const double sd = ell * std::sqrt(a);
  double s_acc = 0.0, s2_acc = 0.0, s_dr = 0.0, s2_dr = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double z = mu + sd * rng.normal(0, i);
    const double acc = z >= 0.0 ? 1.0 : std::exp(z);
    const double dr = z < 0.0 ? acc : 0.0;
    s_acc += acc;
    s2_acc += acc * acc;
    s_dr += dr;
    s2_dr += dr * dr;
  }
  const double n = static_cast<double>(samples);
  const auto se = [n](double s, double s2) {
    const double mean = s / n;
    return std::sqrt(std::max(0.0, s2 / n - mean * mean) / (n - 1.0));
  };
  const double l2 = ell * ell;
  return {l2 * s_acc / n, l2 * se(s_acc, s2_acc), l2 * s_dr / n, l2 * se(s_dr, s2_dr)};
}

CheckResult check_equilibrium_identity() {
  double worst = 0.0;
  for (double c : detail::geometric_grid(0.01, 100.0, 20)) {
    for (double ell : detail::geometric_grid(0.05, 10.0, 20)) {
      const double g = diffusion_coefficient(c, c, ell);
      const double d = drift_coefficient(c, c, ell);
      worst = std::max(worst, std::abs(g - 2.0 * d) / std::max(1e-300, g));
    }
  }
  return {"equilibrium identity Gamma(c,c,l) = 2 G(c,c,l)", worst <= 1e-12,
          "max relative gap " + fmt(worst)};
}

CheckResult check_sign_identity() {
  std::size_t bad = 0, total = 0;
  const auto as = linspace(0.0, 10.0, 10);
  // Offset so that no grid point lies on the diagonal a = b.
  const auto bs = linspace(-5.0 + 0.37, 5.0 - 0.21, 10);
  const auto ells = linspace(0.5, 5.0, 10);
  for (double a : as) {
    for (double b : bs) {
      for (double ell : ells) {
        const double diff = diffusion_coefficient(a, b, ell) - 2.0 * drift_coefficient(a, b, ell);
        const int lhs = (diff > 0.0) - (diff < 0.0);
        const int rhs = (a > b) - (a < b);
        ++total;
        if (lhs != rhs) ++bad;
      }
    }
  }
  return {"sign(Gamma - 2G) = sign(a - b)", bad == 0,
          std::to_string(bad) + " of " + std::to_string(total) + " grid points disagree"};
}

CheckResult check_rate_positivity() {
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (double ell : {0.5, 1.0, 2.0, 4.0}) {
    for (double a : linspace(0.0, 10.0, 41)) {
      for (double b : linspace(-10.0, 10.0, 81)) {
        const double f = entropy_rate(a, b, ell);
        if (f < worst) {
          worst = f;
          where = "(a=" + fmt(a) + ", b=" + fmt(b) + ", l=" + fmt(ell) + ")";
        }
      }
    }
  }
  return {"F(a,b,l) > 0 on [0,10] x [-10,10]", worst > 0.0, "min " + fmt(worst) + " at " + where};
}

CheckResult check_unimodality() {
  const double s_values[] = {0.0, 0.05, 0.3, 1.0, 2.5, 10.0, 100.0, 1e4};
  std::string detail;
  bool ok = true;
  for (double s : s_values) {
    const double hi = std::max(20.0, 4.0 * asymptotic_star_ratio() * std::sqrt(s));
    const auto grid = detail::geometric_grid(1e-3, hi, 1000);
    int changes = 0;
    int last_sign = 0;
    double prev = entropy_rate_unit(s, grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double cur = entropy_rate_unit(s, grid[i]);
      const double diff = cur - prev;
      prev = cur;
      const int sign = (diff > 0.0) - (diff < 0.0);
      if (sign == 0) continue;
      if (last_sign != 0 && sign != last_sign) ++changes;
      last_sign = sign;
    }
    if (changes != 1) ok = false;
    detail += "s=" + fmt(s) + ":" + std::to_string(changes) + " ";
  }
  return {"F1(s, .) unimodal (one sign change of differences)", ok, detail};
}

CheckResult check_oracle(std::uint64_t samples, std::uint64_t seed, std::size_t points,
                         double z_tol) {
  const CounterRng rng(seed);
  double worst = 0.0;
  std::string where;
  for (std::size_t i = 0; i < points; ++i) {
    const double a = 5.0 * rng.uniform(1, i);
    const double b = -2.0 + 7.0 * rng.uniform(2, i);
    const double ell = 0.2 + 3.8 * rng.uniform(3, i);
    const auto est = coefficient_oracle(a, b, ell, samples, rng.child(i).seed());
    const double zg = std::abs(est.gamma - diffusion_coefficient(a, b, ell)) / est.gamma_se;
    const double zd = std::abs(est.drift - drift_coefficient(a, b, ell)) / est.drift_se;
    const double z = std::max(zg, zd);
    if (z > worst) {
      worst = z;
      where = "(a=" + fmt(a, 4) + ", b=" + fmt(b, 4) + ", l=" + fmt(ell, 4) + ")";
    }
  }
  return {"Monte Carlo oracle for Gamma and G", worst <= z_tol,
          std::to_string(points) + " triples, " + std::to_string(samples) +
              " samples each, max |z| = " + fmt(worst, 3) + " at " + where + " (limit " +
              fmt(z_tol, 3) + ")"};
}

std::vector<CheckResult> check_tuning_constants() {
  std::vector<CheckResult> out;
  auto near = [&](std::string name, double value, double expected, double tol) {
    const bool ok = std::abs(value - expected) <= tol;
    out.push_back({std::move(name), ok,
                   fmt(value, 12) + " vs " + fmt(expected, 12) + " (tol " + fmt(tol, 3) + ")"});
  };
  near("l*(0) = sqrt(2)", ell_star(0.0).ell, std::sqrt(2.0), 1e-8);
  near("l*(1) = 1.85", ell_star(1.0).ell, 1.85, 0.01);
  near("l*(1e4)/100 = x*", ell_star(1e4).ell / 100.0, asymptotic_star_ratio(), 0.02);
  near("l^0.234(1) = 2.38", ell_alpha(1.0, Probability(0.234)).ell, 2.38, 0.01);
  near("matched alpha near equilibrium", matched_alpha(MatchRegime::near_equilibrium), 0.35,
       0.005);
  near("matched alpha as s -> 0", matched_alpha(MatchRegime::s_to_zero), std::exp(-1.0), 0.005);
  near("matched alpha as s -> infinity", matched_alpha(MatchRegime::s_to_infinity), 0.27, 0.005);
  return out;
}

std::vector<CheckResult> run_validation_suite(std::uint64_t samples, std::uint64_t seed) {
  std::vector<CheckResult> out{check_equilibrium_identity(), check_sign_identity(),
                               check_rate_positivity(), check_unimodality()};
  for (auto& r : check_tuning_constants()) out.push_back(std::move(r));
  out.push_back(check_oracle(samples, seed));
  return out;
}

bool print_report(std::ostream& out, const std::vector<CheckResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all;
}

}  // namespace tscale
