#include <doctest.h>

#include <cmath>

#include "iclab/errors.hpp"
#include "iclab/numerics.hpp"

using namespace iclab;
using namespace iclab::numerics;

TEST_SUITE("numerics") {
  TEST_CASE("brent finds the fixed point of cos") {
    const auto r = brent_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
    CHECK(r.root == doctest::Approx(0.7390851332151607).epsilon(1e-15));
  }

  TEST_CASE("brent accepts an endpoint root and rejects a bad bracket") {
    CHECK(brent_root([](double x) { return x - 2.0; }, 2.0, 3.0).root == 2.0);
    CHECK_THROWS_AS(brent_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), ConvergenceError);
  }

  TEST_CASE("gauss-kronrod on smooth and singular integrands") {
    CHECK(gauss_kronrod([](double x) { return std::sin(x); }, 0.0, M_PI).value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(gauss_kronrod([](double x) { return std::exp(x); }, 0.0, 1.0).value ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    const auto q = gauss_kronrod([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 20000);
    CHECK(std::abs(q.value - 2.0) < 1e-9);
  }

  TEST_CASE("gauss-kronrod reports failure to converge") {
    CHECK_THROWS_AS(gauss_kronrod([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-12, 50), IntegrationError);
  }

  TEST_CASE("incomplete beta against closed forms") {
    for (double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.999, 1.0}) {
      CHECK(incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-14));
      CHECK(incomplete_beta(2.0, 2.0, x) == doctest::Approx(3 * x * x - 2 * x * x * x).epsilon(1e-13));
      CHECK(incomplete_beta(0.5, 0.5, x) == doctest::Approx(2.0 / M_PI * std::asin(std::sqrt(x))).epsilon(1e-12));
      CHECK(incomplete_beta(3.0, 1.0, x) == doctest::Approx(x * x * x).epsilon(1e-13));
    }
  }

  TEST_CASE("incomplete beta reflection") {
    for (double a : {0.7, 2.5, 11.0})
      for (double b : {0.5, 3.0, 20.0})
        for (double x : {0.05, 0.4, 0.9}) {
          CHECK(incomplete_beta(a, b, x) + incomplete_beta(b, a, 1.0 - x) == doctest::Approx(1.0).epsilon(1e-12));
        }
  }

  TEST_CASE("beta density integrates to one and matches the CDF derivative") {
    for (double a : {1.0, 2.5, 7.0}) {
      const auto q = gauss_kronrod([a](double x) { return beta_pdf(a, a, x); }, 0.0, 1.0);
      CHECK(q.value == doctest::Approx(1.0).epsilon(1e-10));
      const double x = 0.37, h = 1e-6;
      const double fd = (incomplete_beta(a, a, x + h) - incomplete_beta(a, a, x - h)) / (2 * h);
      CHECK(beta_pdf(a, a, x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}
