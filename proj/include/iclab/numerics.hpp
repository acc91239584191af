#pragma once

#include <functional>

namespace iclab::numerics {

struct RootResult {
  double root = 0.0;
  double value = 0.0;  // f(root)
  int iterations = 0;
};

// Brent's method on a bracket with f(lo) and f(hi) of opposite sign.
// Stops when the bracket is below rel_tol * |x| (plus a tiny absolute floor)
// or f hits zero. Throws ConvergenceError on a bad bracket or iteration cap.
RootResult brent_root(const std::function<double(double)>& f, double lo, double hi,
                      double rel_tol = 4e-16, int max_iter = 500);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
// Throws IntegrationError if the error estimate does not reach abs_tol
// within max_intervals subdivisions.
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               double abs_tol = 1e-10, int max_intervals = 4000);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Beta density with shape (a, b) at x in (0, 1).
double beta_pdf(double a, double b, double x);

}  // namespace iclab::numerics
