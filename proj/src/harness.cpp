#include "iclab/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <thread>

#include "iclab/baselines.hpp"
#include "iclab/theory.hpp"

namespace iclab {

using nlohmann::json;

const std::vector<std::string> kCsvColumns = {
    "d",     "tau",   "alpha",    "kappa",  "rho",          "lambda",       "seed",        "replicate", "mode",
    "e_icl", "e_icl_se", "e_idg", "e_idg_se", "g_task", "e_icl_theory", "e_idg_theory", "wall_time_s", "status"};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string theory_cell(const std::optional<double>& v, bool divergent) {
  return divergent ? std::string("inf") : cell(v);
}

ResultRow base_row(const SweepJob& job) {
  ResultRow r;
  r.d = job.d;
  r.params = job.params;
  r.seed = job.seed;
  r.replicate = job.replicate;
  return r;
}

std::string error_status(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return "error:" + err->code();
  return "error:InternalError";
}

void set_gap(ResultRow& r) {
  if (r.e_icl && r.e_idg) r.g_task = *r.e_icl - *r.e_idg;
}

}  // namespace

void write_csv_header(std::ostream& os) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) os << (i ? "," : "") << kCsvColumns[i];
  os << '\n';
}

void write_csv_row(std::ostream& os, const ResultRow& r) {
  const auto& p = r.params;
  os << (r.d ? std::to_string(*r.d) : "") << ',' << format_double(p.tau) << ',' << format_double(p.alpha) << ','
     << format_double(p.kappa) << ',' << format_double(p.rho) << ',' << format_double(p.lambda) << ','
     << (r.seed ? std::to_string(*r.seed) : "") << ',' << (r.replicate ? std::to_string(*r.replicate) : "") << ','
     << r.mode << ',' << cell(r.e_icl) << ',' << cell(r.e_icl_se) << ',' << cell(r.e_idg) << ',' << cell(r.e_idg_se)
     << ',' << cell(r.g_task) << ',' << theory_cell(r.e_icl_theory, r.theory_divergent) << ','
     << theory_cell(r.e_idg_theory, r.theory_divergent) << ',' << format_double(r.wall_time_s) << ',' << r.status
     << '\n';
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
}

std::vector<ResultRow> rows_from_record(const SimRecord& rec) {
  ResultRow base;
  base.d = rec.instance.d;
  base.params = rec.nominal;
  base.seed = rec.instance.seed;
  base.replicate = rec.replicate;
  base.e_icl_theory = rec.theory_icl;
  base.e_idg_theory = rec.theory_idg;
  base.theory_divergent = rec.theory_divergent;
  base.wall_time_s = rec.wall_time_s;
  base.status = rec.status;

  std::vector<ResultRow> rows;
  if (rec.population_icl || rec.population_idg) {
    ResultRow r = base;
    r.mode = "population";
    r.e_icl = rec.population_icl;
    r.e_idg = rec.population_idg;
    set_gap(r);
    rows.push_back(r);
  }
  if (rec.empirical_icl || rec.empirical_idg) {
    ResultRow r = base;
    r.mode = "empirical";
    if (rec.empirical_icl) {
      r.e_icl = rec.empirical_icl->mean;
      r.e_icl_se = rec.empirical_icl->std_err;
    }
    if (rec.empirical_idg) {
      r.e_idg = rec.empirical_idg->mean;
      r.e_idg_se = rec.empirical_idg->std_err;
    }
    set_gap(r);
    rows.push_back(r);
  }
  return rows;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate) {
  return derive_seed(base_seed, static_cast<std::uint64_t>(replicate));
}

std::vector<SweepJob> enumerate_jobs(const SweepSpec& spec) {
  std::vector<SweepJob> jobs;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    for (int d : spec.d_list) {
      for (int r = 0; r < spec.replicates; ++r) {
        SweepJob job;
        job.index = jobs.size();
        job.point = i;
        job.d = d;
        job.replicate = r;
        job.params = spec.point(i);
        job.seed = replicate_seed(spec.base_seed, r);
        jobs.push_back(job);
      }
    }
  }
  return jobs;
}

std::vector<ResultRow> run_job(const SweepSpec& spec, const SweepJob& job) {
  const auto inst = FiniteInstance::from_scaling(job.params, job.d, job.seed, spec.task_prior);
  SimOptions opts;
  opts.eval = spec.eval;
  opts.n_test = spec.n_test;
  opts.emit_theory = spec.emit_theory;
  auto rows = rows_from_record(run_instance(inst, opts, job.params, job.replicate));

  if (spec.baselines.ridge || spec.baselines.dmmse) {
    Rng task_rng = make_stream(inst.seed, 1);
    const auto tasks = sim::sample_task_set<double>(inst, task_rng);
    const double alpha = static_cast<double>(inst.ell) / inst.d;
    if (spec.baselines.ridge) {
      ResultRow r = base_row(job);
      r.mode = "ridge";
      try {
        const auto start = std::chrono::steady_clock::now();
        Rng rng = make_stream(inst.seed, 4);
        const auto icl = baselines::ridge_bayes_mc(inst, tasks, EvalMode::icl, spec.baselines.n_mc, rng);
        const auto idg = baselines::ridge_bayes_mc(inst, tasks, EvalMode::idg, spec.baselines.n_mc, rng);
        r.e_icl = icl.mean;
        r.e_icl_se = icl.std_err;
        r.e_idg = idg.mean;
        r.e_idg_se = idg.std_err;
        set_gap(r);
        if (spec.emit_theory) r.e_icl_theory = r.e_idg_theory = baselines::ridge_bayes_error_theory(alpha, inst.rho);
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      } catch (const std::exception& e) {
        r.status = error_status(e);
      }
      rows.push_back(r);
    }
    if (spec.baselines.dmmse) {
      ResultRow r = base_row(job);
      r.mode = "dmmse";
      try {
        const auto start = std::chrono::steady_clock::now();
        Rng rng = make_stream(inst.seed, 5);
        const baselines::DmmseConfig cfg{tasks, inst.rho, spec.baselines.n_mc};
        const auto gap = baselines::dmmse_gtask_mc(cfg, inst, rng);
        r.e_icl = gap.icl.mean;
        r.e_icl_se = gap.icl.std_err;
        r.e_idg = gap.idg.mean;
        r.e_idg_se = gap.idg.std_err;
        r.g_task = gap.g_task;
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      } catch (const std::exception& e) {
        r.status = error_status(e);
      }
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const JobRunner& runner) {
  spec.validate();
  if (spec.d_list.empty()) throw ConfigError("a simulation sweep needs at least one d");
  const auto jobs = enumerate_jobs(spec);
  std::vector<std::vector<ResultRow>> results(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = runner(spec, jobs[i]);
      } catch (const std::exception& e) {
        ResultRow r = base_row(jobs[i]);
        r.mode = std::string(to_string(spec.eval));
        r.status = error_status(e);
        results[i] = {r};
      }
    }
  };

  unsigned n_threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<ResultRow> rows;
  for (auto& rs : results) {
    for (auto& r : rs) {
      if (spec.deterministic) r.wall_time_s = 0.0;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::vector<ResultRow> theory_curve(const SweepSpec& spec) {
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    ResultRow r;
    r.params = spec.point(i);
    r.mode = "theory";
    try {
      const auto pt = theory::evaluate(r.params);
      r.e_icl_theory = pt.e_icl;
      r.e_idg_theory = pt.e_idg;
      r.g_task = pt.g_task();
    } catch (const DivergenceError&) {
      r.theory_divergent = true;
      r.status = "divergent";
    } catch (const std::exception& e) {
      r.status = error_status(e);
    }
    rows.push_back(r);
  }
  return rows;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json make_sidecar(const json& config, std::string_view command) {
  return {{"tool", "iclab"},
          {"version", kToolVersion},
          {"command", std::string(command)},
          {"config_hash", config_hash(config)},
          {"columns", kCsvColumns},
          {"config", config}};
}

std::string resolve_output_path(const std::string& out, const std::string& fallback_name) {
  namespace fs = std::filesystem;
  const char* env = std::getenv("ICLAB_OUTPUT_DIR");
  fs::path path;
  if (env && *env) {
    const fs::path dir(env);
    if (out.empty()) {
      path = dir / fallback_name;
    } else {
      path = fs::path(out).is_absolute() ? fs::path(out) : dir / out;
    }
  } else {
    if (out.empty()) return {};
    path = out;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  return path.string();
}

}  // namespace iclab
