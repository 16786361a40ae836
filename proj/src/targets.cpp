#include "tscale/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tscale/error.hpp"

namespace tscale {
namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Centered differences of V against the supplied derivatives, skipping
// points within 2h of a kink.
void check_derivatives(const Potential& p) {
  constexpr double h = 1e-3;
  constexpr double tol = 1e-5;
  auto near_kink = [&p](double x) {
    return std::any_of(p.kinks().begin(), p.kinks().end(),
                       [x](double k) { return std::abs(x - k) < 4.0 * h; });
  };
  auto fd = [](const auto& f, double x) {
    // fourth-order centered first derivative
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
  };
  for (double x = -4.0; x <= 4.0; x += 0.0625) {
    if (near_kink(x)) continue;
    auto v = [&p](double y) { return p.v(y); };
    auto d1 = [&p](double y) { return p.d1(y); };
    auto d2 = [&p](double y) { return p.d2(y); };
    auto d3 = [&p](double y) { return p.d3(y); };
    const auto close = [](double a, double b) {
      return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
    };
    const bool ok = close(fd(v, x), p.d1(x)) && close(fd(d1, x), p.d2(x)) &&
                    (p.smoothness_order() < 3 || close(fd(d2, x), p.d3(x))) &&
                    (p.smoothness_order() < 4 || close(fd(d3, x), p.d4(x)));
    if (!ok) {
      throw DomainError("potential '" + p.name() +
                        "': derivatives inconsistent with V at x = " + std::to_string(x));
    }
  }
}

}  // namespace

Potential Potential::gaussian() {
  Potential p;
  p.name_ = "gaussian";
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi);
  p.fns_ = {
      [log_norm](double x) { return 0.5 * x * x + log_norm; },
      [](double x) { return x; },
      [](double) { return 1.0; },
      [](double) { return 0.0; },
      [](double) { return 0.0; },
  };
  p.smoothness_order_ = 4;
  p.kinks_ = {};
  p.fisher_ = 1.0;
  return p;
}

Potential Potential::double_well() {
  Potential p;
  p.name_ = "double-well";
  p.fns_ = {
      [](double x) {
        if (std::abs(x) <= 1.0) return (x - 1) * (x - 1) * (x + 1) * (x + 1);
        return 4 * x * x - 8 * std::abs(x) + 4;
      },
      [](double x) {
        if (std::abs(x) <= 1.0) return 2 * (x - 1) * (x + 1) * (x + 1) + 2 * (x - 1) * (x - 1) * (x + 1);
        return 8 * x - 8 * sign(x);
      },
      [](double x) {
        if (std::abs(x) <= 1.0) return 2 * (x + 1) * (x + 1) + 8 * (x - 1) * (x + 1) + 2 * (x - 1) * (x - 1);
        return 8.0;
      },
      [](double x) { return std::abs(x) <= 1.0 ? 24.0 * x : 0.0; },
      [](double x) { return std::abs(x) <= 1.0 ? 24.0 : 0.0; },
  };
  p.smoothness_order_ = 2;
  p.kinks_ = {-1.0, 1.0};
  p.normalize();
  p.fisher_ = stationary_expectation(p, [&p](double x) { return p.d1(x) * p.d1(x); });
  return p;
}

Potential Potential::custom(std::string name, PotentialFunctions fns, int smoothness_order,
                            std::vector<double> kinks, bool trusted) {
  detail::require(fns.v && fns.d1 && fns.d2 && fns.d3 && fns.d4,
                  "custom potential requires V and four derivatives");
  Potential p;
  p.name_ = std::move(name);
  p.fns_ = std::move(fns);
  p.smoothness_order_ = smoothness_order;
  std::sort(kinks.begin(), kinks.end());
  p.kinks_ = std::move(kinks);
  p.normalize();
  if (trusted) {
    p.fisher_ = std::numeric_limits<double>::quiet_NaN();
  } else {
    check_derivatives(p);
    p.fisher_ = stationary_expectation(p, [&p](double x) { return p.d1(x) * p.d1(x); });
  }
  return p;
}

Potential Potential::by_name(std::string_view id) {
  if (id == "gaussian") return gaussian();
  if (id == "double-well") return double_well();
  throw ConfigError("unknown target '" + std::string(id) + "' (expected gaussian or double-well)");
}

void Potential::normalize() {
  shift_ = 0.0;
  const double mass = integrate_line([this](double x) { return std::exp(-fns_.v(x)); }, kinks_);
  detail::require(mass > 0.0 && std::isfinite(mass), "potential '" + name_ + "' is not normalizable");
  shift_ = std::log(mass);
}

double Potential::mala_integrand(double x) const {
  const double g1 = d1(x);
  const double g2 = d2(x);
  return g1 * g1 * g2 + d4(x) - 2.0 * d3(x) * g1 - g2 * g2;
}

double integrate_line(const ScalarFn& g, std::span<const double> breaks, double abs_tol) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cuts(breaks.begin(), breaks.end());
  if (cuts.empty()) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());

  double total = 0.0;
  double total_error = 0.0;
  double total_l1 = 0.0;
  auto panel = [&](double lo, double hi) {
    double error = 0.0;
    double l1 = 0.0;
    total += gauss_kronrod<double, 61>::integrate(g, lo, hi, 15, 1e-13, &error, &l1);
    total_error += error;
    total_l1 += l1;
  };
  panel(-inf, cuts.front());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) panel(cuts[i], cuts[i + 1]);
  panel(cuts.back(), inf);

  if (!(total_error <= abs_tol + 1e-12 * total_l1)) {
    throw ConvergenceError("quadrature did not converge: error estimate " +
                           std::to_string(total_error));
  }
  return total;
}

double stationary_expectation(const Potential& p, const ScalarFn& g) {
  return integrate_line([&](double x) {
    const double w = std::exp(-p.v(x));
    return w == 0.0 ? 0.0 : g(x) * w;
  }, p.kinks());
}

MomentFunctionals stationary_moments(const Potential& p) {
  MomentFunctionals m;
  m.a = stationary_expectation(p, [&p](double x) { return p.d1(x) * p.d1(x); });
  m.b = stationary_expectation(p, [&p](double x) { return p.d2(x); });
  m.i_fisher = m.a;
  m.mala_m4 = stationary_expectation(p, [&p](double x) { return p.mala_integrand(x); });
  // Jumps of V'' and V''' at a kink put point masses into V''' and V''''.
  // Pointwise quadrature cannot see them, so they are added here and the
  // expectation is taken in the weak sense.
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (double k : p.kinks()) {
    const double lo = std::nextafter(k, -inf);
    const double hi = std::nextafter(k, inf);
    const double jump2 = p.d2(hi) - p.d2(lo);
    const double jump3 = p.d3(hi) - p.d3(lo);
    m.mala_m4 += (jump3 - 2.0 * jump2 * p.d1(k)) * std::exp(-p.v(k));
  }
  return m;
}

MomentFunctionals empirical_moments(const Potential& p, std::span<const double> xs) {
  detail::require(!xs.empty(), "empirical_moments: empty sample");
  MomentFunctionals m;
  for (double x : xs) {
    const double g1 = p.d1(x);
    m.a += g1 * g1;
    m.b += p.d2(x);
    m.mala_m4 += p.mala_integrand(x);
  }
  const double inv = 1.0 / static_cast<double>(xs.size());
  m.a *= inv;
  m.b *= inv;
  m.mala_m4 *= inv;
  m.i_fisher = p.fisher_information();
  return m;
}

EquilibriumValues equilibrium_values(const Potential& p) {
  return {stationary_expectation(p, [](double x) { return x; }),
          stationary_expectation(p, [](double x) { return x * x; })};
}

}  // namespace tscale
