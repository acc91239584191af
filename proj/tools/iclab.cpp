// Command-line front end: theory curves, single simulations, sweeps,
// baseline estimators and a quick self test.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "iclab/baselines.hpp"
#include "iclab/harness.hpp"
#include "iclab/theory.hpp"
#include "selftest.hpp"

namespace {

using nlohmann::json;
using namespace iclab;

struct PointFlags {
  double tau = 1.0, alpha = 1.0, rho = 0.0, lambda = 0.0;
  std::string kappa = "1";

  ScalingParams params() const {
    ScalingParams p{tau, alpha, 1.0, rho, lambda};
    if (kappa == "inf") {
      p.kappa = kKappaInfinity;
    } else {
      try {
        p.kappa = parse_kappa(json(std::stod(kappa)));
      } catch (const std::logic_error&) {
        throw ConfigError("--kappa must be a number or inf");
      }
    }
    p.validate();
    return p;
  }
};

void add_point_flags(CLI::App* app, PointFlags& f) {
  app->add_option("--tau", f.tau, "n/d^2")->capture_default_str();
  app->add_option("--alpha", f.alpha, "ell/d")->capture_default_str();
  app->add_option("--kappa", f.kappa, "k/d, or inf")->capture_default_str();
  app->add_option("--rho", f.rho, "label noise variance")->capture_default_str();
  app->add_option("--lambda", f.lambda, "ridge strength (0: ridgeless)")->capture_default_str();
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> eval;
  bool deterministic = false;
};

// Writes rows to the resolved output path (plus a sidecar) or to stdout.
void emit_csv(const std::vector<ResultRow>& rows, const Common& c, const std::string& fallback, const json& config,
              std::string_view command) {
  const auto path = resolve_output_path(c.out, fallback);
  if (path.empty()) {
    write_csv(std::cout, rows);
    return;
  }
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file '" + path + "'");
  write_csv(os, rows);
  std::ofstream side(path + ".json");
  side << make_sidecar(config, command).dump(2) << '\n';
  std::cerr << "wrote " << rows.size() << " rows to " << path << '\n';
}

void emit_json(const json& j, const Common& c, const std::string& fallback) {
  const auto path = resolve_output_path(c.out, fallback);
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file '" + path + "'");
  os << j.dump(2) << '\n';
}

SweepSpec load_with_overrides(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  auto spec = load_sweep_spec(c.config);
  if (c.seed) spec.base_seed = *c.seed;
  if (c.threads) spec.threads = *c.threads;
  if (c.eval) spec.eval = parse_eval_selection(*c.eval);
  if (c.deterministic) spec.deterministic = true;
  spec.validate();
  return spec;
}

json point_json(const ScalingParams& p) {
  json j = {{"tau", p.tau}, {"alpha", p.alpha}, {"kappa", p.kappa}, {"rho", p.rho}, {"lambda", p.lambda}};
  try {
    const auto pt = theory::evaluate(p);
    j["e_icl"] = pt.e_icl;
    j["e_idg"] = pt.e_idg;
    j["g_task"] = pt.g_task();
    if (pt.ridgeless) {
      const auto& r = *pt.ridgeless;
      j["ridgeless"] = {{"q_star", r.q_star}, {"m_star", r.m_star}, {"mu_star", r.mu_star},
                        {"xi_star", r.xi_star}, {"p_star", r.p_star}};
    }
    if (pt.xi) {
      j["xi"] = {{"xi", pt.xi->xi}, {"nu", pt.xi->nu}, {"residual", pt.xi->residual},
                 {"quartic_residual", pt.xi->quartic_residual}};
      j["c_e"] = pt.c_e;
    }
    j["status"] = "ok";
  } catch (const DivergenceError&) {
    j["status"] = "divergent";
  }
  auto extended = [](double v) { return std::isinf(v) ? json("inf") : json(v); };
  j["icl_limit_alpha_inf"] = extended(theory::icl_limit_alpha_inf(p.tau, p.kappa, p.rho));
  j["icl_limit_alpha_before_lambda"] = extended(theory::icl_limit_alpha_before_lambda(p.tau, p.kappa, p.rho));
  return j;
}

int fail(const std::string& code, const std::string& message, int exit_code) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-context learning of linear attention: theory, simulation and baselines"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON sweep config");
    sub->add_option("--out", common.out, "output file (default: stdout)");
    sub->add_option("--seed", common.seed, "base seed");
    sub->add_option("--threads", common.threads, "worker threads (0: all cores)");
    sub->add_option("--eval", common.eval, "population|empirical|both")
        ->check(CLI::IsMember({"population", "empirical", "both"}));
    sub->add_flag("--deterministic", common.deterministic, "write wall_time_s as 0");
  };

  auto* theory_cmd = app.add_subcommand("theory", "asymptotic error curves");
  PointFlags theory_point;
  add_common(theory_cmd);
  add_point_flags(theory_cmd, theory_point);

  auto* simulate_cmd = app.add_subcommand("simulate", "one finite-d instance");
  PointFlags sim_point;
  int sim_d = 20;
  long sim_n_test = 10000;
  std::string sim_prior = "gaussian";
  add_common(simulate_cmd);
  add_point_flags(simulate_cmd, sim_point);
  simulate_cmd->add_option("--d", sim_d, "token dimension")->capture_default_str();
  simulate_cmd->add_option("--n-test", sim_n_test, "empirical test contexts")->capture_default_str();
  simulate_cmd->add_option("--task-prior", sim_prior, "gaussian|sphere")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep from a config file");
  add_common(sweep_cmd);

  auto* baselines_cmd = app.add_subcommand("baselines", "ridge and dMMSE estimators");
  std::string kind = "ridge";
  int bl_d = 20;
  double bl_alpha = 1.0, bl_rho = 0.01, bl_kappa = 1.0;
  long bl_n_mc = 1000, bl_k = 0;
  std::string bl_prior = "gaussian";
  add_common(baselines_cmd);
  baselines_cmd->add_option("--kind", kind, "ridge|dmmse|dmmse-limit")
      ->check(CLI::IsMember({"ridge", "dmmse", "dmmse-limit"}))
      ->capture_default_str();
  baselines_cmd->add_option("--d", bl_d, "token dimension")->capture_default_str();
  baselines_cmd->add_option("--alpha", bl_alpha, "ell/d")->capture_default_str();
  baselines_cmd->add_option("--rho", bl_rho, "label noise variance")->capture_default_str();
  baselines_cmd->add_option("--kappa", bl_kappa, "k/d (ignored when --k is given)")->capture_default_str();
  baselines_cmd->add_option("--k", bl_k, "number of tasks");
  baselines_cmd->add_option("--n-mc", bl_n_mc, "Monte Carlo contexts")->capture_default_str();
  baselines_cmd->add_option("--task-prior", bl_prior, "gaussian|sphere")->capture_default_str();

  auto* selftest_cmd = app.add_subcommand("selftest", "quick invariant suite");
  add_common(selftest_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), 2);
  }

  try {
    if (theory_cmd->parsed()) {
      if (!common.config.empty()) {
        const auto spec = load_with_overrides(common);
        emit_csv(theory_curve(spec), common, "theory.csv", to_json(spec), "theory");
      } else {
        emit_json(point_json(theory_point.params()), common, "theory.json");
      }
    } else if (simulate_cmd->parsed()) {
      const auto p = sim_point.params();
      const std::uint64_t seed = common.seed.value_or(0);
      const auto inst = FiniteInstance::from_scaling(p, sim_d, seed, parse_task_prior(sim_prior));
      SimOptions opts;
      opts.eval = common.eval ? parse_eval_selection(*common.eval) : EvalSelection::population;
      opts.n_test = sim_n_test;
      auto rec = run_instance(inst, opts, p, 0);
      if (common.deterministic) rec.wall_time_s = 0.0;
      json config = {{"d", sim_d},           {"seed", seed},
                     {"tau", p.tau},         {"alpha", p.alpha},
                     {"kappa", p.kappa},     {"rho", p.rho},
                     {"lambda", p.lambda},   {"eval", std::string(to_string(opts.eval))},
                     {"n_test", sim_n_test}, {"task_prior", sim_prior}};
      emit_csv(rows_from_record(rec), common, "simulate.csv", config, "simulate");
    } else if (sweep_cmd->parsed()) {
      const auto spec = load_with_overrides(common);
      emit_csv(run_sweep(spec), common, "sweep.csv", to_json(spec), "sweep");
    } else if (baselines_cmd->parsed()) {
      json out = {{"kind", kind}, {"d", bl_d}};
      if (kind == "dmmse-limit") {
        const long k = bl_k > 0 ? bl_k : std::max(1L, std::lround(bl_kappa * bl_d));
        out["k"] = k;
        out["g_task"] = baselines::dmmse_gtask_alpha_inf(bl_d, k);
        out["g_task_asymptotic"] = baselines::dmmse_gtask_alpha_inf_asymptotic(bl_d, k);
      } else {
        const ScalingParams p{1.0, bl_alpha, bl_kappa, bl_rho, 1.0};
        auto inst = FiniteInstance::from_scaling(p, bl_d, common.seed.value_or(0), parse_task_prior(bl_prior));
        if (bl_k > 0) inst.k = bl_k;
        Rng task_rng = make_stream(inst.seed, 1);
        const auto tasks = sim::sample_task_set<double>(inst, task_rng);
        Rng rng = make_stream(inst.seed, 4);
        out["ell"] = inst.ell;
        out["k"] = inst.k;
        out["rho"] = bl_rho;
        out["n_mc"] = bl_n_mc;
        if (kind == "ridge") {
          const auto icl = baselines::ridge_bayes_mc(inst, tasks, EvalMode::icl, bl_n_mc, rng);
          const auto idg = baselines::ridge_bayes_mc(inst, tasks, EvalMode::idg, bl_n_mc, rng);
          out["e_icl"] = {{"mean", icl.mean}, {"std_err", icl.std_err}};
          out["e_idg"] = {{"mean", idg.mean}, {"std_err", idg.std_err}};
          out["e_theory"] = baselines::ridge_bayes_error_theory(static_cast<double>(inst.ell) / inst.d, bl_rho);
        } else {
          const baselines::DmmseConfig cfg{tasks, bl_rho, bl_n_mc};
          const auto g = baselines::dmmse_gtask_mc(cfg, inst, rng);
          out["e_icl"] = {{"mean", g.icl.mean}, {"std_err", g.icl.std_err}};
          out["e_idg"] = {{"mean", g.idg.mean}, {"std_err", g.idg.std_err}};
          out["g_task"] = {{"mean", g.g_task}, {"std_err", g.std_err}};
        }
      }
      emit_json(out, common, "baselines.json");
    } else if (selftest_cmd->parsed()) {
      return iclab::tools::run_selftest(std::cout) ? 0 : 1;
    }
  } catch (const Error& e) {
    return fail(e.code(), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 1);
  }
  return 0;
}
