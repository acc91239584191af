#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "iclab/harness.hpp"

namespace iclab {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.get<double>();
}

template <typename Int>
Int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  if (j.is_number_unsigned()) return static_cast<Int>(j.get<std::uint64_t>());
  return static_cast<Int>(j.get<std::int64_t>());
}

bool boolean(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("'" + key + "' must be a string");
  return j.get<std::string>();
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "tau") return SweepAxis::tau;
  if (s == "alpha") return SweepAxis::alpha;
  if (s == "kappa") return SweepAxis::kappa;
  if (s == "lambda") return SweepAxis::lambda;
  throw ConfigError("unknown axis '" + s + "' (expected tau|alpha|kappa|lambda)");
}

json kappa_json(double kappa) { return kappa >= kKappaInfinity ? json("inf") : json(kappa); }

}  // namespace

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::tau: return "tau";
    case SweepAxis::alpha: return "alpha";
    case SweepAxis::kappa: return "kappa";
    default: return "lambda";
  }
}

double parse_kappa(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kKappaInfinity;
    throw ConfigError("kappa must be a number or \"inf\"");
  }
  return std::min(number(j, "kappa"), kKappaInfinity);
}

ScalingParams SweepSpec::point(std::size_t i) const {
  ScalingParams p = base;
  const double v = values.at(i);
  switch (axis) {
    case SweepAxis::tau: p.tau = v; break;
    case SweepAxis::alpha: p.alpha = v; break;
    case SweepAxis::kappa: p.kappa = v; break;
    case SweepAxis::lambda: p.lambda = v; break;
  }
  return p;
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("values must be nonempty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw ConfigError("values must be strictly increasing");
  }
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (n_test < 1) throw ConfigError("n_test must be positive");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (baselines.n_mc < 1) throw ConfigError("baselines.n_mc must be positive");
  for (int d : d_list) {
    if (d < 2) throw ConfigError("every d must be at least 2");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    try {
      point(i).validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("grid point ") + std::to_string(i) + ": " + e.what());
    }
  }
}

SweepSpec parse_sweep_spec(const json& j) {
  reject_unknown_keys(j,
                      {"axis", "values", "base", "d", "replicates", "eval", "emit_theory", "base_seed", "task_prior",
                       "n_test", "threads", "deterministic", "baselines"},
                      "config");
  SweepSpec s;
  if (!j.contains("axis")) throw ConfigError("config: missing 'axis'");
  if (!j.contains("values")) throw ConfigError("config: missing 'values'");
  if (!j.contains("base")) throw ConfigError("config: missing 'base'");
  s.axis = parse_axis(string(j.at("axis"), "axis"));

  const auto& vals = j.at("values");
  if (!vals.is_array()) throw ConfigError("'values' must be an array");
  for (const auto& v : vals) s.values.push_back(s.axis == SweepAxis::kappa ? parse_kappa(v) : number(v, "values"));

  const auto& b = j.at("base");
  reject_unknown_keys(b, {"tau", "alpha", "kappa", "rho", "lambda"}, "base");
  if (b.contains("tau")) s.base.tau = number(b.at("tau"), "base.tau");
  if (b.contains("alpha")) s.base.alpha = number(b.at("alpha"), "base.alpha");
  if (b.contains("kappa")) s.base.kappa = parse_kappa(b.at("kappa"));
  if (b.contains("rho")) s.base.rho = number(b.at("rho"), "base.rho");
  if (b.contains("lambda")) s.base.lambda = number(b.at("lambda"), "base.lambda");

  if (j.contains("d")) {
    const auto& d = j.at("d");
    if (d.is_array()) {
      for (const auto& x : d) s.d_list.push_back(integer<int>(x, "d"));
    } else {
      s.d_list.push_back(integer<int>(d, "d"));
    }
  }
  if (j.contains("replicates")) s.replicates = integer<int>(j.at("replicates"), "replicates");
  if (j.contains("eval")) s.eval = parse_eval_selection(string(j.at("eval"), "eval"));
  if (j.contains("emit_theory")) s.emit_theory = boolean(j.at("emit_theory"), "emit_theory");
  if (j.contains("base_seed")) s.base_seed = integer<std::uint64_t>(j.at("base_seed"), "base_seed");
  if (j.contains("task_prior")) s.task_prior = parse_task_prior(string(j.at("task_prior"), "task_prior"));
  if (j.contains("n_test")) s.n_test = integer<long>(j.at("n_test"), "n_test");
  if (j.contains("threads")) s.threads = integer<int>(j.at("threads"), "threads");
  if (j.contains("deterministic")) s.deterministic = boolean(j.at("deterministic"), "deterministic");
  if (j.contains("baselines")) {
    const auto& bl = j.at("baselines");
    reject_unknown_keys(bl, {"ridge", "dmmse", "n_mc"}, "baselines");
    if (bl.contains("ridge")) s.baselines.ridge = boolean(bl.at("ridge"), "baselines.ridge");
    if (bl.contains("dmmse")) s.baselines.dmmse = boolean(bl.at("dmmse"), "baselines.dmmse");
    if (bl.contains("n_mc")) s.baselines.n_mc = integer<long>(bl.at("n_mc"), "baselines.n_mc");
  }
  s.validate();
  return s;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_sweep_spec(j);
}

json to_json(const SweepSpec& s) {
  json values = json::array();
  for (double v : s.values) values.push_back(s.axis == SweepAxis::kappa ? kappa_json(v) : json(v));
  return {
      {"axis", std::string(to_string(s.axis))},
      {"values", values},
      {"base",
       {{"tau", s.base.tau},
        {"alpha", s.base.alpha},
        {"kappa", kappa_json(s.base.kappa)},
        {"rho", s.base.rho},
        {"lambda", s.base.lambda}}},
      {"d", s.d_list},
      {"replicates", s.replicates},
      {"eval", std::string(to_string(s.eval))},
      {"emit_theory", s.emit_theory},
      {"base_seed", s.base_seed},
      {"task_prior", std::string(to_string(s.task_prior))},
      {"n_test", s.n_test},
      {"threads", s.threads},
      {"deterministic", s.deterministic},
      {"baselines", {{"ridge", s.baselines.ridge}, {"dmmse", s.baselines.dmmse}, {"n_mc", s.baselines.n_mc}}},
  };
}

}  // namespace iclab
