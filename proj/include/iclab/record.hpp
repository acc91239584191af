#pragma once

#include <optional>
#include <string>

#include "iclab/instance.hpp"
#include "iclab/params.hpp"
#include "iclab/simulator.hpp"

namespace iclab {

enum class EvalSelection { population, empirical, both };

inline std::string_view to_string(EvalSelection e) {
  switch (e) {
    case EvalSelection::population: return "population";
    case EvalSelection::empirical: return "empirical";
    default: return "both";
  }
}

inline EvalSelection parse_eval_selection(std::string_view s) {
  if (s == "population") return EvalSelection::population;
  if (s == "empirical") return EvalSelection::empirical;
  if (s == "both") return EvalSelection::both;
  throw ConfigError("unknown eval mode '" + std::string(s) + "' (expected population|empirical|both)");
}

struct SimOptions {
  EvalSelection eval = EvalSelection::population;
  long n_test = 10000;
  sim::RidgeRoute route = sim::RidgeRoute::automatic;
  bool emit_theory = true;
};

// Outcome of one (grid point, d, replicate) job.
struct SimRecord {
  FiniteInstance instance;
  ScalingParams nominal;  // grid point the instance was built from
  int replicate = 0;

  std::optional<double> population_icl;
  std::optional<double> population_idg;
  std::optional<sim::ErrorEstimate> empirical_icl;
  std::optional<sim::ErrorEstimate> empirical_idg;

  std::optional<double> theory_icl;
  std::optional<double> theory_idg;
  bool theory_divergent = false;

  double wall_time_s = 0.0;
  std::string status = "ok";  // ok | error:<code>
  std::string message;

  bool ok() const { return status == "ok"; }
};

// Equality on everything except wall time.
bool same_outcome(const SimRecord& a, const SimRecord& b);

// Theory values at a grid point; divergent branches are flagged instead of thrown.
void attach_theory(SimRecord& rec);

// Samples tasks, generates n contexts, pretrains Gamma* and evaluates it.
// Tasks, pretraining contexts and test contexts use separate streams derived
// from instance.seed. When k divides n every task gets exactly n/k contexts;
// otherwise each context picks its task uniformly.
SimRecord run_instance(const FiniteInstance& instance, const SimOptions& options = {},
                       const std::optional<ScalingParams>& nominal = std::nullopt, int replicate = 0);

// Gamma* alone, plus the task set it was trained on.
struct Pretrained {
  sim::TaskSet<double> tasks;
  sim::AttentionParams<double> params;
  double target_energy = 0.0;  // sum of squared pretraining targets
};

Pretrained pretrain(const FiniteInstance& instance, sim::RidgeRoute route = sim::RidgeRoute::automatic);

}  // namespace iclab
