#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "tscale/coefficients.hpp"
#include "tscale/validation.hpp"

using namespace tscale;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double phi(double x) { return static_cast<double>(oracle::phi(x)); }

// Closed form of F on the diagonal a = b = 1.
double f_diag_unit(double ell) {
  return 2.0 * ell * ell *
         ((1.0 + ell * ell / 4.0) * phi(-ell / 2.0) -
          ell / (2.0 * std::sqrt(2.0 * M_PI)) * std::exp(-ell * ell / 8.0));
}

}  // namespace

TEST_CASE("Gamma and G at a = b = 1 reduce to 2 l^2 Phi(-l/2)") {
  for (double ell : {0.1, 0.7, 1.5, 2.38, 4.0, 9.0}) {
    const double h = 2.0 * ell * ell * phi(-ell / 2.0);
    CHECK(diffusion_coefficient(1.0, 1.0, ell) == doctest::Approx(h).epsilon(1e-13));
    CHECK(drift_coefficient(1.0, 1.0, ell) == doctest::Approx(h / 2.0).epsilon(1e-13));
  }
}

TEST_CASE("Gamma and G: infinite and zero moment branches") {
  CHECK(diffusion_coefficient(GradMoment::infinite(), 0.3, 1.7) == doctest::Approx(1.445).epsilon(1e-15));
  CHECK(drift_coefficient(GradMoment::infinite(), -3.0, 2.0) == 0.0);
  CHECK(acceptance_rate(GradMoment::infinite(), 5.0, 3.0) == doctest::Approx(0.5));
  for (double b : {-2.0, 0.0, 0.4, 3.0}) {
    const double ell = 1.3;
    const double bp = std::max(b, 0.0);
    CHECK(diffusion_coefficient(0.0, b, ell) == doctest::Approx(ell * ell * std::exp(-ell * ell * bp / 2)));
    const double g = b > 0 ? ell * ell * std::exp(-ell * ell * b / 2) : 0.0;
    CHECK(drift_coefficient(0.0, b, ell) == doctest::Approx(g));
  }
  CHECK(acceptance_rate(0.0, -1.0, 0.8) == 1.0);
  CHECK(acceptance_rate(0.0, -1.0, 5.0) == 1.0);
}

TEST_CASE("acceptance rate at the classical point is about 0.234") {
  CHECK(std::abs(acceptance_rate(1.0, 1.0, 2.38) - 0.234) <= 0.001);
  CHECK(acceptance_rate(1.0, 1.0, 2.38) == doctest::Approx(2.0 * phi(-1.19)).epsilon(1e-13));
}

TEST_CASE("Gamma, G and acc agree with quadrature of the Gaussian representation") {
  struct Point {
    double a, b, ell;
  };
  for (const Point& p : {Point{2.0, 0.5, 1.3}, Point{3.0, 2.0, 1.1}, Point{0.3, -1.5, 2.2},
                         Point{7.0, 4.0, 0.4}, Point{0.05, 3.0, 3.5}}) {
    INFO("a = " << p.a << " b = " << p.b << " l = " << p.ell);
    const double g = static_cast<double>(oracle::gamma(p.a, p.b, p.ell));
    const double d = static_cast<double>(oracle::drift(p.a, p.b, p.ell));
    CHECK(diffusion_coefficient(p.a, p.b, p.ell) == doctest::Approx(g).epsilon(1e-12));
    CHECK(drift_coefficient(p.a, p.b, p.ell) == doctest::Approx(d).epsilon(1e-12));
    CHECK(acceptance_rate(p.a, p.b, p.ell) == doctest::Approx(g / (p.ell * p.ell)).epsilon(1e-12));
  }
}

TEST_CASE("Gamma and G agree with the Monte Carlo oracle at 1e7 samples") {
  struct Point {
    double a, b, ell;
  };
  std::uint64_t seed = 101;
  for (const Point& p : {Point{2.0, 0.5, 1.3}, Point{3.0, 2.0, 1.1}}) {
    const auto est = coefficient_oracle(p.a, p.b, p.ell, 10'000'000, seed++);
    INFO("a = " << p.a << " b = " << p.b);
    CHECK(std::abs(est.gamma - diffusion_coefficient(p.a, p.b, p.ell)) <= 3.0 * est.gamma_se);
    CHECK(std::abs(est.drift - drift_coefficient(p.a, p.b, p.ell)) <= 3.0 * est.drift_se);
  }
}

TEST_CASE("G <= Gamma <= l^2 and Gamma > 0") {
  for (double a : {0.0, 0.01, 0.5, 2.0, 10.0, 1e4}) {
    for (double b : {-10.0, -1.0, 0.0, 0.5, 3.0, 10.0}) {
      for (double ell : {0.05, 0.5, 2.0, 8.0}) {
        const double g = diffusion_coefficient(a, b, ell);
        const double d = drift_coefficient(a, b, ell);
        CHECK(g > 0.0);
        CHECK(g <= ell * ell * (1.0 + 1e-15));
        CHECK(d >= 0.0);
        CHECK(d <= g);
      }
    }
  }
}

TEST_CASE("coefficients stay finite where the exponential factor overflows") {
  // l^2 (a - b) / 2 far beyond the double exponent range.
  const double g = diffusion_coefficient(1e4, -1e4, 1.0);
  const double d = drift_coefficient(1e4, -1e4, 1.0);
  CHECK(std::isfinite(g));
  CHECK(std::isfinite(d));
  CHECK(g <= 1.0);
  CHECK(d <= g);
  CHECK(g == doctest::Approx(static_cast<double>(oracle::gamma(1e4, -1e4, 1.0))).epsilon(1e-8));
  CHECK(std::isfinite(entropy_rate(1e3, -1e3, 2.0)));
  CHECK(entropy_rate(1e3, -1e3, 2.0) > 0.0);
}

TEST_CASE("F: zero moment and diagonal closed forms") {
  for (double ell : {0.3, 1.0, 2.5}) {
    for (double b : {0.5, 2.0}) {
      CHECK(entropy_rate(0.0, b, ell) == doctest::Approx(ell * ell * std::exp(-ell * ell * b / 2)));
    }
    CHECK(entropy_rate(1.0, 1.0, ell) == doctest::Approx(f_diag_unit(ell)).epsilon(1e-12));
  }
}

TEST_CASE("F is continuous across the diagonal") {
  for (double a : {0.2, 1.0, 3.0, 10.0}) {
    for (double ell : {0.5, 1.5, 3.0}) {
      const double on = entropy_rate(a, a, ell);
      for (double off : {1e-8, -1e-8, 1e-6, -1e-6}) {
        CHECK(std::abs(entropy_rate(a, a + off, ell) - on) <= 1e-5);
      }
    }
  }
}

TEST_CASE("F agrees with the quotient of the quadrature oracles off the diagonal") {
  for (double a : {0.5, 2.0, 6.0}) {
    for (double b : {-3.0, 1.0, 4.5}) {
      const double ref = static_cast<double>(oracle::entropy_rate(a, b, 1.4));
      CHECK(entropy_rate(a, b, 1.4) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("F1 matches F(s, 1, l) and the scaling relation") {
  for (double ell : {0.4, 1.0, 2.0}) {
    CHECK(entropy_rate_unit(0.0, ell) == doctest::Approx(ell * ell * std::exp(-ell * ell / 2)));
    CHECK(entropy_rate_unit(1.0, ell) == doctest::Approx(f_diag_unit(ell)).epsilon(1e-12));
  }
  CHECK(entropy_rate_unit(4.0, 1.0) == doctest::Approx(entropy_rate(4.0, 1.0, 1.0)).epsilon(1e-12));
  for (double a : {0.0, 0.3, 2.0, 9.0}) {
    for (double b : {0.25, 1.0, 4.0}) {
      for (double ell : {0.5, 1.7, 3.2}) {
        const double lhs = entropy_rate(a, b, ell);
        const double rhs = entropy_rate_unit(a / b, ell * std::sqrt(b)) / b;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("dF1/dl matches a centered difference") {
  for (double s : {0.0, 0.3, 1.0, 5.0, 100.0}) {
    for (double ell : {0.5, 1.5, 4.0, 12.0}) {
      const double h = 1e-5 * ell;
      const double fd = (entropy_rate_unit(s, ell + h) - entropy_rate_unit(s, ell - h)) / (2 * h);
      CHECK(entropy_rate_unit_dl(s, ell) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("J: endpoint, reference value and identity with acc") {
  for (double s : {0.1, 1.0, 7.0}) CHECK(acceptance_curve(s, 0.0) == doctest::Approx(1.0));
  CHECK(std::abs(acceptance_curve(1.0, 2.38) - 0.234) <= 0.001);
  CHECK(acceptance_curve(0.5, 1.0) == doctest::Approx(acceptance_rate(0.5, 1.0, 1.0)).epsilon(1e-13));
  for (double a : {0.2, 1.0, 5.0}) {
    for (double b : {0.5, 2.0}) {
      CHECK(acceptance_rate(a, b, 1.3) ==
            doctest::Approx(acceptance_curve(a / b, 1.3 * std::sqrt(b))).epsilon(1e-12));
    }
  }
}

TEST_CASE("J is strictly decreasing in l and below its Mills-type bound at l = 50") {
  for (double s : {0.05, 0.5, 1.0, 3.0, 40.0}) {
    double prev = 1.0 + 1e-12;
    for (int i = 1; i <= 2000; ++i) {
      const double ell = 0.01 * i;
      const double j = acceptance_curve(s, ell);
      CHECK(j < prev);
      prev = j;
    }
  }
  for (double s : {0.75, 1.0, 4.0}) {
    const double ell = 50.0;
    const double y = ell * (1.0 / (2.0 * std::sqrt(s)) - std::sqrt(s));
    const double bound = std::exp(-ell * ell / (8.0 * s)) / std::sqrt(2.0 * M_PI) *
                         (2.0 * std::sqrt(s) / ell + 1.0 / std::abs(y));
    INFO("s = " << s);
    CHECK(acceptance_curve(s, ell) <= bound);
    CHECK(acceptance_curve(s, ell) >= 0.0);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(static_cast<void>(GradMoment(-0.1)), DomainError);
  CHECK_THROWS_AS(static_cast<void>(GradMoment(kInf)), DomainError);
  CHECK_THROWS_AS(diffusion_coefficient(1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(drift_coefficient(1.0, kInf, 1.0), DomainError);
  CHECK_THROWS_AS(entropy_rate(-1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(entropy_rate_unit(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(acceptance_curve(0.0, 1.0), DomainError);
  CHECK(GradMoment::infinite().is_infinite());
  CHECK(std::isinf(GradMoment::infinite().value()));
  CHECK(GradMoment(0.0).is_zero());
}
