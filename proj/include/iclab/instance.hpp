#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "iclab/errors.hpp"
#include "iclab/params.hpp"

namespace iclab {

enum class TaskPrior { gaussian, sphere };
enum class EvalMode { icl, idg };

inline std::string_view to_string(TaskPrior p) { return p == TaskPrior::gaussian ? "gaussian" : "sphere"; }

inline TaskPrior parse_task_prior(std::string_view s) {
  if (s == "gaussian") return TaskPrior::gaussian;
  if (s == "sphere") return TaskPrior::sphere;
  throw ConfigError("unknown task prior '" + std::string(s) + "' (expected gaussian|sphere)");
}

// A concrete finite-d experiment.
struct FiniteInstance {
  int d = 2;
  long n = 1;    // pretraining contexts
  int ell = 1;   // context length
  long k = 1;    // number of pretraining tasks
  double rho = 0.0;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  TaskPrior task_prior = TaskPrior::gaussian;

  // n = round(tau d^2), ell = round(alpha d), k = round(kappa d), each at least 1.
  // The kappa sentinel kKappaInfinity maps to k = n.
  static FiniteInstance from_scaling(const ScalingParams& p, int d, std::uint64_t seed,
                                     TaskPrior prior = TaskPrior::gaussian) {
    p.validate();
    if (d < 2) throw DomainError("FiniteInstance: d must be at least 2");
    auto at_least_one = [](double v) { return std::max(1L, std::lround(v)); };
    FiniteInstance inst;
    inst.d = d;
    inst.n = at_least_one(p.tau * d * d);
    inst.ell = static_cast<int>(at_least_one(p.alpha * d));
    // kappa = infinity: every pretraining context gets its own task
    inst.k = p.kappa >= kKappaInfinity ? inst.n : at_least_one(p.kappa * d);
    inst.rho = p.rho;
    inst.lambda = p.lambda;
    inst.seed = seed;
    inst.task_prior = prior;
    return inst;
  }

  // Realized load ratios.
  ScalingParams scaling() const {
    const double dd = d;
    return {static_cast<double>(n) / (dd * dd), ell / dd, static_cast<double>(k) / dd, rho, lambda};
  }

  long feature_dim() const { return static_cast<long>(d) * (d + 1); }

  void validate() const {
    if (d < 2) throw DomainError("FiniteInstance: d must be at least 2");
    if (n < 1 || ell < 1 || k < 1) throw DomainError("FiniteInstance: n, ell, k must be positive");
    if (!(rho >= 0.0)) throw DomainError("FiniteInstance: rho must be nonnegative");
    if (!(lambda > 0.0)) throw DomainError("FiniteInstance: lambda must be positive");
  }
};

}  // namespace iclab
