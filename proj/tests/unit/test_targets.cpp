#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tscale/error.hpp"
#include "tscale/special.hpp"
#include "tscale/targets.hpp"

using namespace tscale;

namespace {

// Raw double well without the normalizing shift.
double dw_raw(double x) {
  const double ax = std::abs(x);
  return ax <= 1 ? (x - 1) * (x - 1) * (x + 1) * (x + 1) : 4 * x * x - 8 * ax + 4;
}

long double dw_integral(const std::function<long double(long double)>& g) {
  const long double inf = std::numeric_limits<long double>::infinity();
  long double total = 0;
  const long double knots[] = {-inf, -3, -1, 0, 1, 3, inf};
  for (int i = 0; i < 6; ++i) total += oracle::integrate(g, knots[i], knots[i + 1]);
  return total;
}

void check_derivatives(const Potential& p, const std::vector<double>& xs) {
  for (double x : xs) {
    const double h = 1e-4;
    INFO(p.name() << " at x = " << x);
    CHECK(p.d1(x) == doctest::Approx((p.v(x + h) - p.v(x - h)) / (2 * h)).epsilon(1e-5).scale(1));
    CHECK(p.d2(x) == doctest::Approx((p.d1(x + h) - p.d1(x - h)) / (2 * h)).epsilon(1e-5).scale(1));
    CHECK(p.d3(x) == doctest::Approx((p.d2(x + h) - p.d2(x - h)) / (2 * h)).epsilon(1e-5).scale(1));
    CHECK(p.d4(x) == doctest::Approx((p.d3(x + h) - p.d3(x - h)) / (2 * h)).epsilon(1e-5).scale(1));
  }
}

}  // namespace

TEST_CASE("gaussian potential") {
  const auto g = Potential::gaussian();
  CHECK(g.v(0.0) == doctest::Approx(0.5 * std::log(2 * M_PI)).epsilon(1e-15));
  CHECK(std::abs(g.v(0.0) - 0.91894) <= 1e-5);
  CHECK(g.d1(3.0) == 3.0);
  CHECK(g.d2(-7.0) == 1.0);
  CHECK(g.d3(2.0) == 0.0);
  CHECK(g.d4(2.0) == 0.0);
  CHECK(g.fisher_information() == doctest::Approx(1.0).epsilon(1e-10));
  const double mass = stationary_expectation(g, [](double) { return 1.0; });
  CHECK(std::abs(mass - 1.0) <= 1e-10);
  const auto mo = stationary_moments(g);
  CHECK(mo.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mo.b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mo.mala_m4) <= 1e-8);
  CHECK(std::abs(mo.i_fisher - 1.0) <= 1e-9);
}

TEST_CASE("gaussian MALA moment under N(0, sigma^2) is sigma^2 - 1") {
  const auto g = Potential::gaussian();
  for (double var : {0.25, 1.0, 2.0, 4.0}) {
    const double sd = std::sqrt(var);
    const double breaks[] = {-3 * sd, 0.0, 3 * sd};
    const double m4 = integrate_line(
        [&](double x) { return g.mala_integrand(x) * normal_pdf(x / sd) / sd; }, breaks);
    CHECK(m4 == doctest::Approx(var - 1.0).epsilon(1e-9).scale(1));
  }
}

TEST_CASE("double-well potential: shape and normalization") {
  const auto dw = Potential::double_well();
  CHECK(dw.v(0.0) - dw.shift() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dw.d1(2.0) == doctest::Approx(8.0));
  CHECK(dw.d1(-2.0) == doctest::Approx(-8.0));
  CHECK(dw.d2(1.0) == doctest::Approx(8.0));
  CHECK(dw.d2(5.0) == 8.0);
  CHECK(dw.d3(0.5) == doctest::Approx(12.0));
  CHECK(dw.d4(0.5) == 24.0);
  CHECK(dw.d3(2.0) == 0.0);
  CHECK(dw.d4(-2.0) == 0.0);
  // Continuity of V and V' across |x| = 1.
  for (double x : {1.0, -1.0}) {
    CHECK(std::abs(dw.v(x) - dw.v(std::nextafter(x, 2 * x))) <= 1e-12);
    CHECK(std::abs(dw.d1(x) - dw.d1(std::nextafter(x, 2 * x))) <= 1e-12);
  }
  // Normalization against an independent quadrature of the raw potential.
  const long double z = dw_integral([](long double x) { return std::exp(-static_cast<long double>(dw_raw(x))); });
  CHECK(dw.shift() == doctest::Approx(static_cast<double>(std::log(z))).epsilon(1e-10));
  CHECK(std::abs(stationary_expectation(dw, [](double) { return 1.0; }) - 1.0) <= 1e-8);
}

TEST_CASE("double-well Fisher information is about 4.07") {
  const auto dw = Potential::double_well();
  const long double z = dw_integral([](long double x) { return std::exp(-static_cast<long double>(dw_raw(x))); });
  const long double i_ref = dw_integral([&](long double x) {
                              const double d = Potential::double_well().d1(static_cast<double>(x));
                              return d * d * std::exp(-static_cast<long double>(dw_raw(x)));
                            }) / z;
  CHECK(dw.fisher_information() == doctest::Approx(static_cast<double>(i_ref)).epsilon(1e-8));
  // 4.07 is the square of 2.38 / 1.18 with the scale rounded to two places,
  // so it only pins I to the width of that rounding; the oracle check above
  // is the precise one.
  CHECK(std::abs(dw.fisher_information() - 4.07) <= 0.025);
  CHECK(std::abs(2.38 / std::sqrt(dw.fisher_information()) - 1.18) <= 0.005);
  const auto mo = stationary_moments(dw);
  CHECK(std::abs(mo.a - mo.b) <= 1e-7);
  CHECK(std::abs(mo.a - mo.i_fisher) <= 1e-7);
  CHECK(std::abs(mo.mala_m4) <= 1e-6);
}

TEST_CASE("derivatives agree with centered differences") {
  check_derivatives(Potential::gaussian(), {-4.0, -1.0, 0.0, 0.3, 2.5});
  // Away from the kinks at |x| = 1.
  check_derivatives(Potential::double_well(), {-3.0, -1.5, -0.6, 0.0, 0.4, 0.9, 1.2, 2.7});
}

TEST_CASE("built-in second and third derivatives are bounded on a wide grid") {
  const auto dw = Potential::double_well();
  for (int i = 0; i <= 2000; ++i) {
    const double x = -100.0 + 0.1 * i;
    CHECK(std::abs(dw.d2(x)) <= 8.0 + 1e-12);
    CHECK(std::abs(dw.d3(x)) <= 24.0 + 1e-12);
  }
}

TEST_CASE("equilibrium values") {
  const auto g = equilibrium_values(Potential::gaussian());
  CHECK(std::abs(g.mean) <= 1e-12);
  CHECK(g.second_moment == doctest::Approx(1.0).epsilon(1e-10));
  const auto dw = equilibrium_values(Potential::double_well());
  const long double z = dw_integral([](long double x) { return std::exp(-static_cast<long double>(dw_raw(x))); });
  const long double m2 =
      dw_integral([](long double x) { return x * x * std::exp(-static_cast<long double>(dw_raw(x))); }) / z;
  CHECK(std::abs(dw.mean) <= 1e-12);
  CHECK(dw.second_moment == doctest::Approx(static_cast<double>(m2)).epsilon(1e-9));
}

TEST_CASE("empirical moments") {
  const auto g = Potential::gaussian();
  const std::vector<double> zeros(3, 0.0);
  auto mo = empirical_moments(g, zeros);
  CHECK(mo.a == 0.0);
  CHECK(mo.b == 1.0);
  CHECK(mo.i_fisher == doctest::Approx(1.0));
  const std::vector<double> tens(7, 10.0);
  mo = empirical_moments(g, tens);
  CHECK(mo.a == doctest::Approx(100.0));
  CHECK(mo.b == 1.0);
  CHECK(mo.mala_m4 == doctest::Approx(99.0));
  const auto dw = Potential::double_well();
  const std::vector<double> wells{1.0, -1.0};
  mo = empirical_moments(dw, wells);
  CHECK(mo.a == doctest::Approx(0.0).scale(1));
  CHECK(mo.b == doctest::Approx(8.0));
  CHECK_THROWS_AS(empirical_moments(g, std::vector<double>{}), DomainError);
}

TEST_CASE("custom potentials") {
  // Unnormalized Gaussian with variance 1/4: V = 2 x^2.
  PotentialFunctions fns{[](double x) { return 2 * x * x; }, [](double x) { return 4 * x; },
                         [](double) { return 4.0; }, [](double) { return 0.0; },
                         [](double) { return 0.0; }};
  const auto p = Potential::custom("narrow", fns, 4);
  CHECK(p.name() == "narrow");
  CHECK(p.shift() == doctest::Approx(0.5 * std::log(M_PI / 2)).epsilon(1e-9));
  CHECK(p.fisher_information() == doctest::Approx(4.0).epsilon(1e-8));
  const auto eq = equilibrium_values(p);
  CHECK(eq.second_moment == doctest::Approx(0.25).epsilon(1e-9));

  // A wrong derivative is caught.
  PotentialFunctions bad = fns;
  bad.d1 = [](double x) { return 3 * x; };
  CHECK_THROWS_AS(Potential::custom("bad", bad, 4), DomainError);
  // A trusted potential skips the checks and leaves I undefined.
  const auto t = Potential::custom("trusted", fns, 4, {}, true);
  CHECK(std::isnan(t.fisher_information()));
}

TEST_CASE("lookup by name") {
  CHECK(Potential::by_name("gaussian").name() == "gaussian");
  CHECK(Potential::by_name("double-well").name() == "double-well");
  CHECK_THROWS(Potential::by_name("banana"));
}
