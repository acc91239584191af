#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iclab/record.hpp"

namespace iclab {

inline constexpr const char* kToolVersion = "0.1.0";

enum class SweepAxis { tau, alpha, kappa, lambda };

std::string_view to_string(SweepAxis a);

struct BaselineOptions {
  bool ridge = false;
  bool dmmse = false;
  long n_mc = 1000;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::tau;
  std::vector<double> values;
  ScalingParams base;
  std::vector<int> d_list;
  int replicates = 1;
  EvalSelection eval = EvalSelection::population;
  bool emit_theory = true;
  std::uint64_t base_seed = 0;
  TaskPrior task_prior = TaskPrior::gaussian;
  long n_test = 10000;
  int threads = 0;  // 0: all available cores
  bool deterministic = false;  // write wall_time_s as 0
  BaselineOptions baselines;

  ScalingParams point(std::size_t i) const;
  void validate() const;
};

// Parses the JSON sweep schema documented in the README. Unknown keys and
// type mismatches raise ConfigError.
SweepSpec parse_sweep_spec(const nlohmann::json& j);
SweepSpec load_sweep_spec(const std::string& path);
nlohmann::json to_json(const SweepSpec& spec);

// Reads "inf" or a number; "inf" maps to the kappa sentinel.
double parse_kappa(const nlohmann::json& j);

// One CSV line.
struct ResultRow {
  std::optional<int> d;
  ScalingParams params;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicate;
  std::string mode;  // population | empirical | ridge | dmmse | theory
  std::optional<double> e_icl, e_icl_se, e_idg, e_idg_se, g_task;
  std::optional<double> e_icl_theory, e_idg_theory;
  bool theory_divergent = false;
  double wall_time_s = 0.0;
  std::string status = "ok";  // ok | divergent | error:<code>
};

extern const std::vector<std::string> kCsvColumns;

std::string format_double(double v);
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ResultRow& row);
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);

// Rows for one finished simulation, one per evaluated mode.
std::vector<ResultRow> rows_from_record(const SimRecord& rec);

// One unit of sweep work.
struct SweepJob {
  std::size_t index = 0;
  std::size_t point = 0;  // index into spec.values
  int d = 0;
  int replicate = 0;
  ScalingParams params;
  std::uint64_t seed = 0;
};

std::vector<SweepJob> enumerate_jobs(const SweepSpec& spec);

// Replicate r of any grid point runs on seed derive_seed(base_seed, r).
std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);

// The default job body: run_instance plus optional baseline rows.
std::vector<ResultRow> run_job(const SweepSpec& spec, const SweepJob& job);

using JobRunner = std::function<std::vector<ResultRow>(const SweepSpec&, const SweepJob&)>;

// Runs every job on a pool of spec.threads workers. Rows come back in job
// order whatever the completion order. A job that throws becomes a single
// row tagged error:<code>; the sweep continues.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const JobRunner& runner = run_job);

// Theory-only rows (mode "theory"); divergent points are flagged, not NaN.
std::vector<ResultRow> theory_curve(const SweepSpec& spec);

// Sidecar describing a run: tool version, full config and its hash.
nlohmann::json make_sidecar(const nlohmann::json& config, std::string_view command);

std::string config_hash(const nlohmann::json& config);

// Resolves an output path against the ICLAB_OUTPUT_DIR override. Relative
// paths (and the fallback name when `out` is empty) land inside that
// directory, which is created on demand.
std::string resolve_output_path(const std::string& out, const std::string& fallback_name);

}  // namespace iclab
