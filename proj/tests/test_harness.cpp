#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "iclab/harness.hpp"

using namespace iclab;
using nlohmann::json;

namespace {

json tiny_config() {
  return json::parse(R"({
    "axis": "tau",
    "values": [0.5, 2.0],
    "base": {"alpha": 1.0, "kappa": 1.0, "rho": 0.1, "lambda": 0.01},
    "d": [5, 7],
    "replicates": 3,
    "eval": "both",
    "n_test": 100,
    "base_seed": 12,
    "deterministic": true
  })");
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("CSV header is stable") {
    std::ostringstream os;
    write_csv_header(os);
    CHECK(os.str() ==
          "d,tau,alpha,kappa,rho,lambda,seed,replicate,mode,e_icl,e_icl_se,e_idg,e_idg_se,g_task,"
          "e_icl_theory,e_idg_theory,wall_time_s,status\n");
  }

  TEST_CASE("floats round-trip through the CSV format") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e17}) {
      CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  }

  TEST_CASE("config parsing and validation") {
    const auto spec = parse_sweep_spec(tiny_config());
    CHECK(spec.axis == SweepAxis::tau);
    CHECK(spec.values == std::vector<double>{0.5, 2.0});
    CHECK(spec.d_list == std::vector<int>{5, 7});
    CHECK(spec.eval == EvalSelection::both);
    CHECK(spec.base.kappa == 1.0);
    CHECK(spec.point(1).tau == 2.0);

    auto unknown = tiny_config();
    unknown["bogus"] = 1;
    CHECK_THROWS_AS(parse_sweep_spec(unknown), ConfigError);
    auto nested = tiny_config();
    nested["base"]["beta"] = 1;
    CHECK_THROWS_AS(parse_sweep_spec(nested), ConfigError);
    auto unsorted = tiny_config();
    unsorted["values"] = {2.0, 0.5};
    CHECK_THROWS_AS(parse_sweep_spec(unsorted), ConfigError);
    auto empty = tiny_config();
    empty["values"] = json::array();
    CHECK_THROWS_AS(parse_sweep_spec(empty), ConfigError);
    auto reps = tiny_config();
    reps["replicates"] = 0;
    CHECK_THROWS_AS(parse_sweep_spec(reps), ConfigError);
    auto typed = tiny_config();
    typed["replicates"] = "three";
    CHECK_THROWS_AS(parse_sweep_spec(typed), ConfigError);
    auto negative = tiny_config();
    negative["base"]["rho"] = -1.0;
    CHECK_THROWS_AS(parse_sweep_spec(negative), ConfigError);
    CHECK_THROWS_AS(load_sweep_spec("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("infinite kappa spelling and round trip") {
    auto j = tiny_config();
    j["base"]["kappa"] = "inf";
    const auto spec = parse_sweep_spec(j);
    CHECK(spec.base.kappa == kKappaInfinity);
    const auto again = parse_sweep_spec(to_json(spec));
    CHECK(to_json(again) == to_json(spec));
    CHECK(to_json(spec)["base"]["kappa"] == "inf");
  }

  TEST_CASE("jobs and seeds") {
    const auto spec = parse_sweep_spec(tiny_config());
    const auto jobs = enumerate_jobs(spec);
    CHECK(jobs.size() == 2 * 2 * 3);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      CHECK(jobs[i].index == i);
      CHECK(jobs[i].seed == replicate_seed(12, jobs[i].replicate));
    }
    std::set<std::uint64_t> seeds;
    for (int r = 0; r < 100; ++r) seeds.insert(replicate_seed(12, r));
    CHECK(seeds.size() == 100);
  }

  TEST_CASE("sweeps are byte-identical across runs and thread counts") {
    auto spec = parse_sweep_spec(tiny_config());
    spec.threads = 1;
    const auto a = csv(run_sweep(spec));
    spec.threads = 3;
    const auto b = csv(run_sweep(spec));
    CHECK(a == b);
    spec.base_seed = 13;
    CHECK(csv(run_sweep(spec)) != a);
  }

  TEST_CASE("sweep rows carry modes, theory and status") {
    const auto spec = parse_sweep_spec(tiny_config());
    const auto rows = run_sweep(spec);
    CHECK(rows.size() == 2 * 2 * 3 * 2);
    for (const auto& r : rows) {
      CHECK(r.status == "ok");
      CHECK((r.mode == "population" || r.mode == "empirical"));
      CHECK(r.e_icl.has_value());
      CHECK(r.e_icl_theory.has_value());
      CHECK(*r.g_task == *r.e_icl - *r.e_idg);
      CHECK(r.e_icl_se.has_value() == (r.mode == "empirical"));
    }
  }

  TEST_CASE("theory columns do not depend on replicate or seed") {
    auto spec = parse_sweep_spec(tiny_config());
    const auto rows = run_sweep(spec);
    spec.base_seed = 999;
    const auto other = run_sweep(spec);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(*rows[i].e_icl_theory == *other[i].e_icl_theory);
      CHECK(*rows[i].e_idg_theory == *rows[i - i % 6].e_idg_theory);
    }
  }

  TEST_CASE("a failing job is tagged and the sweep continues") {
    const auto spec = parse_sweep_spec(tiny_config());
    const JobRunner flaky = [](const SweepSpec& s, const SweepJob& job) -> std::vector<ResultRow> {
      if (job.index == 4) throw NumericalError("injected");
      return run_job(s, job);
    };
    const auto rows = run_sweep(spec, flaky);
    const auto clean = run_sweep(spec);
    CHECK(rows.size() == clean.size() - 1);
    int failed = 0;
    for (const auto& r : rows) {
      if (r.status != "ok") {
        ++failed;
        CHECK(r.status == "error:NumericalError");
        CHECK(r.replicate == 1);
      }
    }
    CHECK(failed == 1);
    CHECK(csv({rows.begin(), rows.begin() + 8}) == csv({clean.begin(), clean.begin() + 8}));
  }

  TEST_CASE("ridgeless simulation rows fail cleanly") {
    auto j = tiny_config();
    j["base"]["lambda"] = 0.0;
    j["eval"] = "population";
    const auto rows = run_sweep(parse_sweep_spec(j));
    for (const auto& r : rows) CHECK(r.status == "error:DomainError");
  }

  TEST_CASE("baseline rows") {
    auto j = tiny_config();
    j["eval"] = "population";
    j["baselines"] = {{"ridge", true}, {"dmmse", true}, {"n_mc", 50}};
    const auto rows = run_sweep(parse_sweep_spec(j));
    int ridge = 0, dmmse = 0;
    for (const auto& r : rows) {
      CHECK(r.status == "ok");
      if (r.mode == "ridge") {
        ++ridge;
        CHECK(r.e_icl_theory.has_value());
      }
      if (r.mode == "dmmse") {
        ++dmmse;
        CHECK(r.g_task.has_value());
      }
    }
    CHECK(ridge == 12);
    CHECK(dmmse == 12);
  }

  TEST_CASE("theory curve flags the interpolation threshold") {
    auto j = tiny_config();
    j["values"] = {0.5, 1.0, 2.0};
    j["base"]["lambda"] = 0.0;
    const auto rows = theory_curve(parse_sweep_spec(j));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].status == "ok");
    CHECK(rows[1].status == "divergent");
    CHECK(rows[1].theory_divergent);
    CHECK(rows[2].status == "ok");
    const auto text = csv(rows);
    CHECK(text.find("nan") == std::string::npos);
    CHECK(text.find(",inf,inf,") != std::string::npos);
    CHECK(csv(theory_curve(parse_sweep_spec(j))) == text);
  }

  TEST_CASE("theory curves flatten with the ridge") {
    std::vector<double> spreads;
    for (double l : {0.1, 1.0, 10.0}) {
      json j = {{"axis", "tau"},
                {"values", {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0, 8.0}},
                {"base", {{"alpha", 10.0}, {"kappa", "inf"}, {"rho", 0.01}, {"lambda", l}}}};
      double lo = 1e300, hi = 0.0;
      for (const auto& r : theory_curve(parse_sweep_spec(j))) {
        lo = std::min(lo, *r.e_icl_theory);
        hi = std::max(hi, *r.e_icl_theory);
      }
      spreads.push_back(hi - lo);
    }
    CHECK(spreads[0] > spreads[1]);
    CHECK(spreads[1] > spreads[2]);
  }

  TEST_CASE("sidecar and output directory override") {
    const auto side = make_sidecar(tiny_config(), "sweep");
    CHECK(side["version"] == kToolVersion);
    CHECK(side["config_hash"] == config_hash(tiny_config()));
    CHECK(side["config_hash"].get<std::string>().size() == 16);

    const auto dir = std::filesystem::temp_directory_path() / "iclab_harness_test";
    std::filesystem::remove_all(dir);
    ::setenv("ICLAB_OUTPUT_DIR", dir.c_str(), 1);
    CHECK(resolve_output_path("run.csv", "x.csv") == (dir / "run.csv").string());
    CHECK(resolve_output_path("", "x.csv") == (dir / "x.csv").string());
    CHECK(resolve_output_path("/tmp/abs.csv", "x.csv") == "/tmp/abs.csv");
    CHECK(std::filesystem::is_directory(dir));
    ::unsetenv("ICLAB_OUTPUT_DIR");
    CHECK(resolve_output_path("", "x.csv").empty());
    CHECK(resolve_output_path("plain.csv", "x.csv") == "plain.csv");
    std::filesystem::remove_all(dir);
  }
}
