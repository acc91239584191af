#include "iclab/baselines.hpp"

#include <cmath>
#include <vector>

#include "iclab/numerics.hpp"
#include "iclab/rmt.hpp"

namespace iclab::baselines {

Eigen::VectorXd ridge_bayes_estimate(const sim::ContextSample<double>& c, double rho) {
  if (!(rho > 0.0)) throw DomainError("ridge_bayes: rho must be positive");
  const auto x = c.inputs();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(c.d(), c.d());
  a.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  a.diagonal().array() += rho;
  return a.selfadjointView<Eigen::Lower>().llt().solve(x.transpose() * c.ys);
}

double ridge_bayes_predict(const sim::ContextSample<double>& c, double rho) {
  return c.query().dot(ridge_bayes_estimate(c, rho));
}

double ridge_bayes_error_theory(double alpha, double rho) {
  if (!(alpha > 0.0) || !(rho > 0.0)) throw DomainError("ridge_bayes_error_theory: alpha and rho must be positive");
  return rho * (1.0 + rmt::mp_stieltjes(alpha, rho / alpha) / alpha);
}

sim::ErrorEstimate ridge_bayes_mc(const FiniteInstance& inst, const sim::TaskSet<double>& tasks, EvalMode mode,
                                  long n_mc, Rng& rng) {
  if (n_mc < 1) throw DomainError("ridge_bayes_mc: n_mc must be positive");
  if (mode == EvalMode::idg && tasks.k() < 1) throw DomainError("ridge_bayes_mc: IDG needs a task set");
  std::uniform_int_distribution<long> pick(0, std::max<long>(tasks.k() - 1, 0));
  sim::MeanAccumulator acc;
  for (long t = 0; t < n_mc; ++t) {
    const Eigen::VectorXd w = mode == EvalMode::icl ? sim::sample_task<double>(inst.d, inst.task_prior, rng)
                                                    : Eigen::VectorXd(tasks.vectors.row(pick(rng)).transpose());
    const auto c = sim::sample_context<double>(w, inst, rng);
    acc.add(inst.rho + (w - ridge_bayes_estimate(c, inst.rho)).squaredNorm() / inst.d);
  }
  return acc.estimate();
}

void DmmseConfig::validate() const {
  if (!(rho > 0.0)) throw DomainError("dMMSE: rho must be positive");
  if (task_set.k() < 1) throw DomainError("dMMSE: task set is empty");
  if (n_mc < 1) throw DomainError("dMMSE: n_mc must be positive");
}

DmmseEstimate dmmse_estimate(const sim::ContextSample<double>& c, const DmmseConfig& config) {
  config.validate();
  const auto& w = config.task_set.vectors;
  if (w.cols() != c.d()) throw DomainError("dMMSE: task dimension does not match context");
  // residuals y - X w_j, one column per task
  const Eigen::MatrixXd resid = (-(c.inputs() * w.transpose())).colwise() + c.ys;
  Eigen::VectorXd logw = -resid.colwise().squaredNorm().transpose() / (2.0 * config.rho);
  logw.array() -= logw.maxCoeff();
  DmmseEstimate out;
  out.weights = logw.array().exp();
  out.weights /= out.weights.sum();
  out.w_bayes = w.transpose() * out.weights;
  return out;
}

double dmmse_predict(const sim::ContextSample<double>& c, const DmmseConfig& config) {
  return c.query().dot(dmmse_estimate(c, config).w_bayes);
}

GapEstimate dmmse_gtask_mc(const DmmseConfig& config, const FiniteInstance& inst, Rng& rng) {
  config.validate();
  const auto& tasks = config.task_set;
  std::uniform_int_distribution<long> pick(0, tasks.k() - 1);
  sim::MeanAccumulator icl, idg;
  for (long t = 0; t < config.n_mc; ++t) {
    const Eigen::VectorXd w = sim::sample_task<double>(inst.d, inst.task_prior, rng);
    const auto c = sim::sample_context<double>(w, inst.ell, config.rho, rng);
    icl.add(config.rho + (w - dmmse_estimate(c, config).w_bayes).squaredNorm() / inst.d);
  }
  for (long t = 0; t < config.n_mc; ++t) {
    const Eigen::VectorXd w = tasks.vectors.row(pick(rng)).transpose();
    const auto c = sim::sample_context<double>(w, inst.ell, config.rho, rng);
    idg.add(config.rho + (w - dmmse_estimate(c, config).w_bayes).squaredNorm() / inst.d);
  }
  GapEstimate g{icl.estimate(), idg.estimate(), 0.0, 0.0};
  g.g_task = g.icl.mean - g.idg.mean;
  g.std_err = std::hypot(g.icl.std_err, g.idg.std_err);
  return g;
}

double dmmse_gtask_alpha_inf(int d, long k, double abs_tol) {
  if (d < 2) throw DomainError("dmmse_gtask_alpha_inf: d must be at least 2");
  if (k < 1) throw DomainError("dmmse_gtask_alpha_inf: k must be positive");
  const double shape = 0.5 * (d - 1);
  const double kk = static_cast<double>(k);
  // 1 - E[max] = int_0^1 P(max < x) dx = int_0^1 (1 - I_u(D, D))^k du with u = 1 - x,
  // which avoids the cancellation in 1 - E[max] when k is large.
  auto tail = [&](double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return std::exp(kk * std::log1p(-numerics::incomplete_beta(shape, shape, u)));
  };
  // the mass sits at u ~ (D B(D,D) / k)^{1/D}; split there so no panel misses it
  const double log_beta = 2.0 * std::lgamma(shape) - std::lgamma(2.0 * shape);
  const double scale = std::exp((std::log(shape) + log_beta - std::log(kk)) / shape);
  std::vector<double> cuts{0.0};
  for (double m : {0.1, 0.3, 1.0, 3.0, 10.0, 30.0}) {
    if (m * scale < 1.0) cuts.push_back(m * scale);
  }
  cuts.push_back(1.0);
  double total = 0.0;
  const double panel_tol = abs_tol / static_cast<double>(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += numerics::gauss_kronrod(tail, cuts[i], cuts[i + 1], panel_tol, 20000).value;
  }
  return 4.0 * total;
}

double dmmse_gtask_alpha_inf_asymptotic(int d, long k) {
  if (d < 2) throw DomainError("dmmse_gtask_alpha_inf_asymptotic: d must be at least 2");
  if (k < 1) throw DomainError("dmmse_gtask_alpha_inf_asymptotic: k must be positive");
  const double shape = 0.5 * (d - 1);
  const double log_beta = 2.0 * std::lgamma(shape) - std::lgamma(2.0 * shape);
  const double scale = std::exp((std::log(shape) + log_beta) / shape);
  return 4.0 * scale * std::tgamma(1.0 + 1.0 / shape) * std::pow(static_cast<double>(k), -1.0 / shape);
}

}  // namespace iclab::baselines
