#include "iclab/theory.hpp"

#include <cmath>
#include <limits>

namespace iclab::theory {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_off_threshold(const ScalingParams& p) {
  if (p.tau == 1.0) {
    throw DivergenceError("ridgeless errors diverge at the interpolation threshold tau = 1");
  }
}

}  // namespace

RidgelessConstants ridgeless_constants(const ScalingParams& p) {
  p.validate();
  require_off_threshold(p);
  RidgelessConstants c;
  c.q_star = (1.0 + p.rho) / p.alpha;
  c.m_star = rmt::mp_stieltjes(p.kappa, c.q_star);
  c.mu_star = c.q_star * rmt::mp_stieltjes(p.kappa / p.tau, c.q_star);
  if (p.tau < 1.0) {
    c.xi_star = (1.0 - p.tau) * c.q_star / (p.tau * c.mu_star);
    const double s = p.kappa * c.xi_star / (1.0 - p.tau) + 1.0;
    c.p_star = 1.0 / (1.0 - p.kappa / (s * s));
  }
  return c;
}

double icl_error_ridgeless(const ScalingParams& p) {
  const auto c = ridgeless_constants(p);
  const double t = p.tau, r = p.rho, q = c.q_star;
  if (t < 1.0) {
    const double mu = c.mu_star;
    return t * (1.0 + q) / (1.0 - t) * (1.0 - t * (1.0 - mu) * (1.0 - mu) + mu * (r / q - 1.0)) -
           2.0 * t * (1.0 - mu) + (1.0 + r);
  }
  const double m = c.m_star;
  const double mp = rmt::mp_stieltjes_deriv(p.kappa, q);
  return (q + 1.0) * (1.0 - 2.0 * q * m - q * q * mp + (r + q - q * q * m) * m / (t - 1.0)) -
         2.0 * (1.0 - q * m) + (1.0 + r);
}

double idg_error_ridgeless(const ScalingParams& p) {
  const auto c = ridgeless_constants(p);
  const double t = p.tau, r = p.rho, q = c.q_star;
  if (t < 1.0) {
    const double xs = c.xi_star, mu = c.mu_star;
    const double first = (r + q - 2.0 * q * (1.0 - t) * (q / xs + 1.0)) / (1.0 - c.p_star * (1.0 - t));
    const double second = t * mu * (q + xs) * (q + xs) / q;
    return t / (1.0 - t) * (first + second);
  }
  return t / (t - 1.0) * (r + q * (1.0 - q * c.m_star));
}

TheoryPoint ridgeless_point(const ScalingParams& p) {
  TheoryPoint out;
  out.ridgeless = ridgeless_constants(p);
  out.e_icl = icl_error_ridgeless(p);
  out.e_idg = idg_error_ridgeless(p);
  return out;
}

TheoryPoint finite_point(const ScalingParams& p) {
  const auto sol = rmt::solve_xi(p);
  const double xi = sol.xi, nu = sol.nu, r = p.rho, t = p.tau;
  const double m = rmt::mp_stieltjes(p.kappa, nu);
  const double mp = rmt::mp_stieltjes_deriv(p.kappa, nu);

  // shared pieces of the linear/quadratic trace terms
  const double quad = 1.0 - 2.0 * nu * m - nu * nu * mp;
  const double numer = r + nu - nu * nu * m - xi * quad;
  const double denom_core = 1.0 - 2.0 * xi * m - xi * xi * mp;

  TheoryPoint out;
  out.xi = sol;
  out.c_e = numer / (denom_core - t);
  out.e_icl = ((1.0 + r) / p.alpha + 1.0) * (quad - out.c_e * (m + xi * mp)) -
              2.0 * (1.0 - nu * m) + 1.0 + r;
  out.e_idg = t * numer / (t - denom_core);
  return out;
}

double icl_error(const ScalingParams& p) { return finite_point(p).e_icl; }
double idg_error(const ScalingParams& p) { return finite_point(p).e_idg; }

TheoryPoint evaluate(const ScalingParams& p) {
  return p.ridgeless() ? ridgeless_point(p) : finite_point(p);
}

double icl_limit_alpha_inf(double tau, double kappa, double rho) {
  ScalingParams{tau, 1.0, kappa, rho, 0.0}.validate();
  if (kappa <= std::min(tau, 1.0) || tau == 1.0) return kInf;
  if (tau < 1.0) {
    return 1.0 - tau + rho + rho * kappa * tau / ((kappa - tau) * (1.0 - tau));
  }
  return rho + rho * kappa / ((kappa - 1.0) * (tau - 1.0));
}

double icl_limit_alpha_before_lambda(double tau, double kappa, double rho) {
  ScalingParams{tau, 1.0, kappa, rho, 0.0}.validate();
  if (kappa <= std::min(tau, 1.0)) {
    if (kappa == tau || kappa == 1.0) return kInf;
    return 1.0 - kappa + rho + rho * kappa * kappa / ((tau - kappa) * (1.0 - kappa));
  }
  return icl_limit_alpha_inf(tau, kappa, rho);
}

double gtask_proportional_limit(double kappa, double rho, double c_star) {
  if (!(kappa > 0.0) || !(rho >= 0.0) || !(c_star > 0.0)) {
    throw DomainError("gtask_proportional_limit: need kappa > 0, rho >= 0, c* > 0");
  }
  if (kappa >= 1.0) return 0.0;
  return (1.0 - kappa) * (1.0 + rho * c_star / (1.0 + rho));
}

double gtask_large_kappa_coeff(const ScalingParams& p) {
  p.validate();
  require_off_threshold(p);
  const double q = (1.0 + p.rho) / p.alpha, t = p.tau, r = p.rho;
  const double q1 = 1.0 + q;
  if (t < 1.0) {
    const double bracket = (-2.0 * q - 0.5) * t * t + (q * q + (3.0 - r) * q + 1.0 - r) * t -
                           q1 * (q + 0.5 - 0.5 * r);
    return 2.0 * bracket * t / ((t - 1.0) * q1 * q1 * q1);
  }
  return 2.0 * q * q / (q1 * q1 * q1) + (r + q - q * q / q1) / ((t - 1.0) * q1 * q1);
}

}  // namespace iclab::theory
