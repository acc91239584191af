#pragma once

#include <cmath>
#include <limits>

#include "iclab/errors.hpp"

namespace iclab {

// Stand-in for kappa = infinity (fresh task per context). Configs spell it "inf".
inline constexpr double kKappaInfinity = 1e8;

// Dimensionless load parameters of the proportional limit:
// tau = n/d^2, alpha = ell/d, kappa = k/d, rho = noise variance,
// lambda = ridge strength (0 selects the ridgeless formulas).
struct ScalingParams {
  double tau = 1.0;
  double alpha = 1.0;
  double kappa = 1.0;
  double rho = 0.0;
  double lambda = 0.0;

  bool ridgeless() const { return lambda == 0.0; }

  void validate() const {
    auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!finite_pos(tau)) throw DomainError("tau must be positive and finite");
    if (!finite_pos(alpha)) throw DomainError("alpha must be positive and finite");
    if (!finite_pos(kappa)) throw DomainError("kappa must be positive and finite");
    if (!(std::isfinite(rho) && rho >= 0.0)) throw DomainError("rho must be nonnegative");
    if (!(std::isfinite(lambda) && lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
  }
};

}  // namespace iclab
