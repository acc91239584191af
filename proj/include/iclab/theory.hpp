#pragma once

#include <optional>

#include "iclab/params.hpp"
#include "iclab/rmt.hpp"

namespace iclab::theory {

// Scalars shared by the ridgeless closed forms.
struct RidgelessConstants {
  double q_star = 0.0;   // (1 + rho)/alpha
  double m_star = 0.0;   // M_kappa(q*)
  double mu_star = 0.0;  // q* M_{kappa/tau}(q*)
  double xi_star = 0.0;  // (1 - tau) q* / (tau mu*), zero for tau > 1
  double p_star = 0.0;   // only defined for tau < 1
};

RidgelessConstants ridgeless_constants(const ScalingParams& p);

struct TheoryPoint {
  double e_icl = 0.0;
  double e_idg = 0.0;
  std::optional<RidgelessConstants> ridgeless;
  std::optional<rmt::XiSolution> xi;
  double c_e = 0.0;  // variance amplification constant (finite lambda only)

  double g_task() const { return e_icl - e_idg; }
};

// Ridgeless (lambda -> 0+) limits. lambda is ignored. DivergenceError at tau == 1.
double icl_error_ridgeless(const ScalingParams& p);
double idg_error_ridgeless(const ScalingParams& p);
TheoryPoint ridgeless_point(const ScalingParams& p);

// Finite-lambda asymptotic errors; lambda must be positive.
TheoryPoint finite_point(const ScalingParams& p);
double icl_error(const ScalingParams& p);
double idg_error(const ScalingParams& p);

// Dispatches on p.lambda: 0 -> ridgeless, otherwise finite.
TheoryPoint evaluate(const ScalingParams& p);

// alpha -> infinity after lambda -> 0+. Returns +infinity on the divergent
// branch kappa <= min(tau, 1).
double icl_limit_alpha_inf(double tau, double kappa, double rho);

// alpha -> infinity taken before lambda -> 0+ (limits do not commute).
double icl_limit_alpha_before_lambda(double tau, double kappa, double rho);

// tau, alpha -> infinity with c* = alpha/tau fixed.
double gtask_proportional_limit(double kappa, double rho, double c_star);

// Coefficient c such that g_task ~ c/kappa as kappa -> infinity (ridgeless);
// the tau < 1 and tau > 1 branches differ. kappa is ignored.
double gtask_large_kappa_coeff(const ScalingParams& p);

}  // namespace iclab::theory
