#pragma once

#include "iclab/params.hpp"

namespace iclab::rmt {

// M_kappa(nu): normalized trace of (R + nu I)^{-1} for a Wishart-type sample
// second-moment matrix R with aspect ratio kappa = (#samples / dimension),
// in the proportional limit. Solves 1/M = 1/(1 + M/kappa) + nu.
//
// Throws DomainError for kappa <= 0, nu < 0, or nu == 0 with kappa <= 1
// (M diverges there).
double mp_stieltjes(double kappa, double nu);

// dM_kappa/dnu, always negative. Requires nu > 0.
double mp_stieltjes_deriv(double kappa, double nu);

// Residual of the defining identity, 1/M - 1/(1 + M/kappa) - nu.
double mp_identity_residual(double kappa, double nu, double m);

struct XiSolution {
  double xi = 0.0;
  double nu = 0.0;  // (1 + rho)/alpha + xi
  double residual = 0.0;
  double quartic_residual = 0.0;
  int iterations = 0;
};

// Unique positive root of  xi * M_kappa((1+rho)/alpha + xi) - tau*lambda/xi = 1 - tau.
// The left side is increasing in xi, so the root is bracketed by halving /
// doubling from xi = 1 and then polished with Brent.
//
// lambda must be > 0 (ridgeless values come from the theory closed forms).
XiSolution solve_xi(const ScalingParams& params);

// Residual of the xi equation at a given xi.
double xi_equation_residual(const ScalingParams& params, double xi);

// Quartic whose positive root is xi (polynomial form of the xi equation,
// with x = (1+rho)/alpha). Used only as a cross-check.
double xi_quartic(const ScalingParams& params, double xi);

}  // namespace iclab::rmt
