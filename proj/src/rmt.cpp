#include "iclab/rmt.hpp"

#include <cmath>
#include <string>

#include "iclab/numerics.hpp"

namespace iclab::rmt {

double mp_stieltjes(double kappa, double nu) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("mp_stieltjes: kappa must be positive");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("mp_stieltjes: nu must be nonnegative");
  if (nu == 0.0 && kappa <= 1.0) {
    throw DomainError("mp_stieltjes: M_kappa(0) diverges for kappa <= 1");
  }
  const double b = nu + 1.0 - 1.0 / kappa;
  // 2/(b + sqrt(.)) rather than (sqrt(.) - b)/(2 nu): no cancellation for large nu
  return 2.0 / (b + std::sqrt(b * b + 4.0 * nu / kappa));
}

double mp_stieltjes_deriv(double kappa, double nu) {
  if (!(nu > 0.0)) throw DomainError("mp_stieltjes_deriv: nu must be positive");
  const double m = mp_stieltjes(kappa, nu);
  const double km = kappa + m;
  return -m * m / (1.0 - kappa * m * m / (km * km));
}

double mp_identity_residual(double kappa, double nu, double m) {
  return 1.0 / m - 1.0 / (1.0 + m / kappa) - nu;
}

double xi_equation_residual(const ScalingParams& p, double xi) {
  const double q = (1.0 + p.rho) / p.alpha;
  return xi * mp_stieltjes(p.kappa, q + xi) - p.tau * p.lambda / xi - (1.0 - p.tau);
}

double xi_quartic(const ScalingParams& p, double xi) {
  const double k = p.kappa, t = p.tau, l = p.lambda;
  const double x = (1.0 + p.rho) / p.alpha;
  const double c4 = k * t;
  const double c3 = -k * l * t + k * t * x + k * t - k * x - t * t - k + t;
  const double c2 = -k * l * t * x - k * l * t + 2.0 * l * t * t - l * t - t * t * x + 2.0 * t * x - x;
  const double c1 = -l * l * t * t + 2.0 * l * t * t * x - 2.0 * l * t * x;
  const double c0 = -l * l * t * t * x;
  return (((c4 * xi + c3) * xi + c2) * xi + c1) * xi + c0;
}

XiSolution solve_xi(const ScalingParams& params) {
  params.validate();
  if (!(params.lambda > 0.0)) {
    throw DomainError("solve_xi: lambda must be positive (use the ridgeless formulas for lambda = 0)");
  }
  auto f = [&](double xi) { return xi_equation_residual(params, xi); };

  double lo = 1.0, hi = 1.0;
  int expansions = 0;
  while (f(lo) > 0.0) {
    lo *= 0.5;
    if (++expansions > 1100 || lo == 0.0) throw ConvergenceError("solve_xi: no lower bracket");
  }
  expansions = 0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (++expansions > 200) throw ConvergenceError("solve_xi: no upper bracket");
  }
  if (lo == hi) {
    // f(1) == 0 exactly
    lo = 0.5;
    hi = 2.0;
  }
  const auto root = numerics::brent_root(f, lo, hi);
  XiSolution s;
  s.xi = root.root;
  s.nu = (1.0 + params.rho) / params.alpha + s.xi;
  s.residual = f(s.xi);
  s.quartic_residual = xi_quartic(params, s.xi);
  s.iterations = root.iterations;
  if (!(std::abs(s.residual) <= 1e-10)) {
    throw ConvergenceError("solve_xi: residual " + std::to_string(s.residual) + " above 1e-10");
  }
  return s;
}

}  // namespace iclab::rmt
