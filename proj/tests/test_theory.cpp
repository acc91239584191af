#include <doctest.h>

#include <cmath>
#include <vector>

#include "iclab/rmt.hpp"
#include "iclab/theory.hpp"

using namespace iclab;
using namespace iclab::theory;

namespace {

struct GridPoint {
  double tau, alpha, kappa, rho;
};

std::vector<GridPoint> grid() {
  std::vector<GridPoint> g;
  for (double t : {0.25, 0.5, 2.0, 4.0})
    for (double a : {0.5, 1.0, 5.0})
      for (double k : {0.5, 1.0, 2.0})
        for (double r : {0.01, 0.5}) g.push_back({t, a, k, r});
  return g;
}

double universal(double tau, double rho) { return tau < 1.0 ? 1.0 - tau + rho / (1.0 - tau) : rho * tau / (tau - 1.0); }

}  // namespace

TEST_SUITE("theory") {
  TEST_CASE("ridgeless ICL in the universality limit") {
    CHECK(icl_error_ridgeless({0.5, 1e8, 1e8, 0.01, 0.0}) == doctest::Approx(0.52).epsilon(1e-3));
    CHECK(icl_error_ridgeless({2.0, 1e8, 1e8, 0.01, 0.0}) == doctest::Approx(0.02).epsilon(1e-3));
    for (double t : {0.25, 0.5, 2.0, 4.0}) {
      CHECK(icl_error_ridgeless({t, 1e8, 1e8, 0.01, 0.0}) == doctest::Approx(universal(t, 0.01)).epsilon(1e-3));
    }
  }

  TEST_CASE("errors blow up near the interpolation threshold") {
    const double near = icl_error_ridgeless({0.999, 1.0, 0.5, 0.01, 0.0});
    const double far = icl_error_ridgeless({0.5, 1.0, 0.5, 0.01, 0.0});
    CHECK(near > 10.0 * far);
    CHECK_THROWS_AS(icl_error_ridgeless({1.0, 1.0, 0.5, 0.01, 0.0}), DivergenceError);
    CHECK_THROWS_AS(idg_error_ridgeless({1.0, 1.0, 0.5, 0.01, 0.0}), DivergenceError);
    // finite lambda is regular at tau = 1
    const auto pt = finite_point({1.0, 1.0, 0.5, 0.01, 0.1});
    CHECK(std::isfinite(pt.e_icl));
    CHECK(std::isfinite(pt.e_idg));
  }

  TEST_CASE("ridgeless IDG above the threshold") {
    // M_1(1) = 2/(1 + sqrt 5)
    const double m = 2.0 / (1.0 + std::sqrt(5.0));
    const double expected = 2.0 * (1.0 - m);
    CHECK(idg_error_ridgeless({2.0, 1.0, 1.0, 0.0, 0.0}) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(idg_error({2.0, 1.0, 1.0, 0.0, 1e-8}) == doctest::Approx(expected).epsilon(1e-4));
  }

  TEST_CASE("ridgeless and finite-lambda paths agree on the grid") {
    for (const auto& g : grid()) {
      const ScalingParams p{g.tau, g.alpha, g.kappa, g.rho, 0.0};
      const ScalingParams q{g.tau, g.alpha, g.kappa, g.rho, 1e-8};
      const auto a = evaluate(p);
      const auto b = evaluate(q);
      CHECK(std::abs(b.e_icl - a.e_icl) / a.e_icl < 1e-4);
      CHECK(std::abs(b.e_idg - a.e_idg) / a.e_idg < 1e-4);
    }
  }

  TEST_CASE("nonnegativity, noise floor and memorization gap on the grid") {
    for (const auto& g : grid()) {
      for (double l : {0.0, 1e-3, 1.0}) {
        const auto pt = evaluate({g.tau, g.alpha, g.kappa, g.rho, l});
        CHECK(pt.e_icl >= 0.0);
        CHECK(pt.e_idg >= 0.0);
        CHECK(pt.e_icl >= g.rho);
        CHECK(pt.g_task() >= -1e-10);
        CHECK(pt.g_task() == pt.e_icl - pt.e_idg);
      }
    }
  }

  TEST_CASE("heavy ridge returns the label variance") {
    for (double t : {0.5, 2.0}) {
      const auto pt = finite_point({t, 1.0, 1.0, 0.3, 1e9});
      CHECK(pt.e_icl == doctest::Approx(1.3).epsilon(1e-6));
      CHECK(pt.e_idg == doctest::Approx(1.3).epsilon(1e-6));
    }
  }

  TEST_CASE("larger ridge flattens the double-descent peak") {
    const std::vector<double> taus = {0.25, 0.5, 0.8, 1.0, 1.25, 2.0, 4.0, 10.0};
    auto curve = [&](double l) {
      std::vector<double> e;
      for (double t : taus) e.push_back(icl_error({t, 10.0, kKappaInfinity, 0.01, l}));
      return e;
    };
    // weak ridge: a bump at the threshold
    const auto weak = curve(1e-3);
    CHECK(weak[3] > weak[2]);
    CHECK(weak[3] > weak[4]);
    std::vector<double> spreads;
    for (double l : {0.1, 1.0, 10.0}) {
      const auto e = curve(l);
      for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] < e[i - 1]);
      spreads.push_back(e.front() - e.back());
    }
    CHECK(spreads[0] > spreads[1]);
    CHECK(spreads[1] > spreads[2]);
  }

  TEST_CASE("large-alpha divergence gate") {
    for (double t : {0.5, 2.0})
      for (double k : {0.2, 0.4}) {
        if (k > std::min(t, 1.0)) continue;
        double prev = 0.0;
        for (double a : {10.0, 100.0, 1000.0}) {
          const double e = icl_error_ridgeless({t, a, k, 0.1, 0.0});
          CHECK(e > prev);
          prev = e;
        }
        CHECK(std::isinf(icl_limit_alpha_inf(t, k, 0.1)));
      }
  }

  TEST_CASE("alpha-infinity limits") {
    CHECK(std::isinf(icl_limit_alpha_inf(0.5, 0.3, 0.1)));
    CHECK(icl_limit_alpha_inf(0.5, 1.0, 0.1) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(icl_limit_alpha_inf(2.0, 2.0, 0.1) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(icl_limit_alpha_before_lambda(2.0, 0.5, 0.1) ==
          doctest::Approx(1.0 - 0.5 + 0.1 + 0.1 * 0.25 / (1.5 * 0.5)).epsilon(1e-14));
    CHECK(icl_limit_alpha_before_lambda(0.5, 1.0, 0.1) == icl_limit_alpha_inf(0.5, 1.0, 0.1));
    CHECK(icl_limit_alpha_before_lambda(2.0, 2.0, 0.1) == icl_limit_alpha_inf(2.0, 2.0, 0.1));
  }

  TEST_CASE("alpha-infinity limit is approached by the ridgeless curve") {
    for (const auto& [t, k] : {std::pair{0.5, 1.0}, std::pair{2.0, 2.0}}) {
      const double limit = icl_limit_alpha_inf(t, k, 0.1);
      CHECK(icl_error_ridgeless({t, 1e6, k, 0.1, 0.0}) == doctest::Approx(limit).epsilon(1e-4));
    }
  }

  TEST_CASE("proportional-limit memorization gap") {
    CHECK(gtask_proportional_limit(0.5, 0.0, 5.0) == doctest::Approx(0.5));
    CHECK(gtask_proportional_limit(2.0, 0.3, 5.0) == 0.0);
    CHECK(gtask_proportional_limit(1.0 - 1e-9, 0.4, 3.0) < 1e-8);
  }

  TEST_CASE("large-kappa coefficients") {
    CHECK(gtask_large_kappa_coeff({2.0, 1.0, 1.0, 0.0, 0.0}) == doctest::Approx(0.375).epsilon(1e-14));
    // q = 1: bracket = -2.5/4 + 5/2 - 3 = -1.125, c1 = 2 (-1.125)(0.5) / ((-0.5) 8)
    CHECK(gtask_large_kappa_coeff({0.5, 1.0, 1.0, 0.0, 0.0}) == doctest::Approx(0.28125).epsilon(1e-14));
    for (double t : {0.5, 2.0}) {
      const ScalingParams p{t, 1.0, 1e3, 0.0, 0.0};
      const auto pt = ridgeless_point(p);
      CHECK(1e3 * pt.g_task() == doctest::Approx(gtask_large_kappa_coeff(p)).epsilon(0.01));
    }
  }

  TEST_CASE("ridgeless constants") {
    const ScalingParams p{0.5, 2.0, 1.5, 0.2, 0.0};
    const auto c = ridgeless_constants(p);
    CHECK(c.q_star == doctest::Approx(0.6));
    CHECK(c.m_star == doctest::Approx(rmt::mp_stieltjes(1.5, 0.6)));
    CHECK(c.mu_star == doctest::Approx(0.6 * rmt::mp_stieltjes(3.0, 0.6)));
    CHECK(c.xi_star == doctest::Approx(0.5 * 0.6 / (0.5 * c.mu_star)));
    CHECK(c.xi_star > 0.0);
  }
}
