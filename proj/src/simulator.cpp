#include "iclab/record.hpp"

#include <chrono>

#include "iclab/theory.hpp"

namespace iclab {

namespace {

enum Stream : std::uint64_t { kTasks = 1, kTraining = 2, kTesting = 3 };

bool same_estimate(const std::optional<sim::ErrorEstimate>& a, const std::optional<sim::ErrorEstimate>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || (a->mean == b->mean && a->std_err == b->std_err);
}

}  // namespace

bool same_outcome(const SimRecord& a, const SimRecord& b) {
  const auto& x = a.instance;
  const auto& y = b.instance;
  return x.d == y.d && x.n == y.n && x.ell == y.ell && x.k == y.k && x.rho == y.rho && x.lambda == y.lambda &&
         x.seed == y.seed && x.task_prior == y.task_prior && a.replicate == b.replicate &&
         a.population_icl == b.population_icl && a.population_idg == b.population_idg &&
         same_estimate(a.empirical_icl, b.empirical_icl) && same_estimate(a.empirical_idg, b.empirical_idg) &&
         a.theory_icl == b.theory_icl && a.theory_idg == b.theory_idg && a.status == b.status;
}

void attach_theory(SimRecord& rec) {
  try {
    const auto point = theory::evaluate(rec.nominal);
    rec.theory_icl = point.e_icl;
    rec.theory_idg = point.e_idg;
  } catch (const DivergenceError&) {
    rec.theory_divergent = true;
  }
}

Pretrained pretrain(const FiniteInstance& inst, sim::RidgeRoute route) {
  inst.validate();
  Rng task_rng = make_stream(inst.seed, kTasks);
  Rng train_rng = make_stream(inst.seed, kTraining);

  Pretrained out{sim::sample_task_set<double>(inst, task_rng), {}, 0.0};
  sim::RidgeAccumulator<double> acc(inst.d, inst.n, route);

  const bool balanced = inst.n % inst.k == 0;
  const long per_task = balanced ? inst.n / inst.k : 0;
  std::uniform_int_distribution<long> pick(0, inst.k - 1);
  for (long mu = 0; mu < inst.n; ++mu) {
    const long task = balanced ? mu / per_task : pick(train_rng);
    const auto c = sim::sample_context<double>(out.tasks.vectors.row(task).transpose(), inst, train_rng, task);
    acc.add(c.query(), sim::context_summary(c), c.target);
    out.target_energy += c.target * c.target;
  }
  out.params = acc.solve(inst.lambda);
  return out;
}

SimRecord run_instance(const FiniteInstance& inst, const SimOptions& options, const std::optional<ScalingParams>& nominal,
                       int replicate) {
  const auto start = std::chrono::steady_clock::now();
  SimRecord rec;
  rec.instance = inst;
  rec.nominal = nominal.value_or(inst.scaling());
  rec.replicate = replicate;

  const auto trained = pretrain(inst, options.route);
  const auto& gamma = trained.params.gamma;
  const double alpha = static_cast<double>(inst.ell) / inst.d;

  if (options.eval != EvalSelection::empirical) {
    rec.population_icl = sim::population_error(gamma, sim::TestMoments<double>::icl(inst.d, inst.task_prior), alpha, inst.rho);
    rec.population_idg = sim::population_error(gamma, sim::TestMoments<double>::idg(trained.tasks), alpha, inst.rho);
  }
  if (options.eval != EvalSelection::population) {
    Rng test_rng = make_stream(inst.seed, kTesting);
    rec.empirical_icl = sim::empirical_error(gamma, inst, trained.tasks, EvalMode::icl, options.n_test, test_rng);
    rec.empirical_idg = sim::empirical_error(gamma, inst, trained.tasks, EvalMode::idg, options.n_test, test_rng);
  }
  if (options.emit_theory) attach_theory(rec);

  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace iclab
