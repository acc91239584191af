#pragma once

#include <Eigen/Dense>

#include "iclab/instance.hpp"
#include "iclab/random.hpp"
#include "iclab/simulator.hpp"

namespace iclab::baselines {

// Posterior mean of w under the isotropic Gaussian prior:
// (sum x_i x_i^T + rho I)^{-1} sum y_i x_i.
Eigen::VectorXd ridge_bayes_estimate(const sim::ContextSample<double>& context, double rho);

// x_query^T of the estimate above.
double ridge_bayes_predict(const sim::ContextSample<double>& context, double rho);

// Asymptotic error of the ridge estimator, rho (1 + M_alpha(rho/alpha)/alpha).
// Identical for ICL and IDG test tasks.
double ridge_bayes_error_theory(double alpha, double rho);

// Monte Carlo error of the ridge estimator over n_mc fresh contexts. ICL draws
// tasks from the prior, IDG uniformly from `tasks`. Each context contributes its
// error averaged over the query and the query noise, rho + |w - w_hat|^2/d.
sim::ErrorEstimate ridge_bayes_mc(const FiniteInstance& instance, const sim::TaskSet<double>& tasks, EvalMode mode,
                                  long n_mc, Rng& rng);

struct DmmseConfig {
  sim::TaskSet<double> task_set;
  double rho = 0.0;
  long n_mc = 1000;

  void validate() const;
};

struct DmmseEstimate {
  Eigen::VectorXd weights;  // posterior over the k tasks, sums to 1
  Eigen::VectorXd w_bayes;  // sum_j weights_j w_j
};

// Posterior over the discrete task set; weights are normalized in the log
// domain after subtracting the largest exponent.
DmmseEstimate dmmse_estimate(const sim::ContextSample<double>& context, const DmmseConfig& config);

double dmmse_predict(const sim::ContextSample<double>& context, const DmmseConfig& config);

struct GapEstimate {
  sim::ErrorEstimate icl;
  sim::ErrorEstimate idg;
  double g_task = 0.0;
  double std_err = 0.0;
};

// e_ICL - e_IDG of the dMMSE estimator, config.n_mc contexts per side. Fresh
// ICL tasks follow instance.task_prior; instance supplies d, ell and rho.
GapEstimate dmmse_gtask_mc(const DmmseConfig& config, const FiniteInstance& instance, Rng& rng);

// alpha -> infinity gap 4 (1 - E[max of k i.i.d. Beta(D, D)]), D = (d - 1)/2,
// by adaptive quadrature of the order-statistic distribution.
double dmmse_gtask_alpha_inf(int d, long k, double abs_tol = 1e-11);

// Large-k behaviour of the same quantity, 4 (D B(D,D))^{1/D} Gamma(1 + 1/D) k^{-1/D}.
double dmmse_gtask_alpha_inf_asymptotic(int d, long k);

}  // namespace iclab::baselines
