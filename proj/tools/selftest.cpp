#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "iclab/baselines.hpp"
#include "iclab/harness.hpp"
#include "iclab/rmt.hpp"
#include "iclab/theory.hpp"

namespace iclab::tools {

namespace {

struct Check {
  std::string name;
  std::function<std::string()> body;  // empty string: pass; otherwise the failure detail
};

std::string fmt(const char* label, double v) {
  std::ostringstream os;
  os << label << '=' << v;
  return os.str();
}

std::vector<Check> checks() {
  return {
      {"stieltjes_identity",
       [] {
         double worst = 0.0;
         for (double k : {0.2, 0.5, 1.0, 2.0, 5.0, 100.0})
           for (double nu : {0.01, 0.1, 1.0, 10.0}) {
             const double m = rmt::mp_stieltjes(k, nu);
             worst = std::max(worst, std::abs(rmt::mp_identity_residual(k, nu, m)) * m);
           }
         return worst < 1e-12 ? std::string() : fmt("worst_rel_residual", worst);
       }},
      {"stieltjes_derivative",
       [] {
         double worst = 0.0;
         for (double k : {0.5, 1.0, 2.0})
           for (double nu : {0.1, 1.0, 4.0}) {
             const double h = 1e-6;
             const double fd = (rmt::mp_stieltjes(k, nu + h) - rmt::mp_stieltjes(k, nu - h)) / (2 * h);
             const double exact = rmt::mp_stieltjes_deriv(k, nu);
             worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
           }
         return worst < 1e-6 ? std::string() : fmt("worst_rel_diff", worst);
       }},
      {"xi_residual",
       [] {
         double worst = 0.0;
         for (double t : {0.25, 2.0})
           for (double a : {0.5, 5.0})
             for (double l : {1e-4, 1.0}) {
               const auto s = rmt::solve_xi({t, a, 1.0, 0.1, l});
               worst = std::max(worst, std::abs(s.residual));
             }
         return worst < 1e-10 ? std::string() : fmt("worst_residual", worst);
       }},
      {"ridgeless_limit_consistency",
       [] {
         double worst = 0.0;
         for (double t : {0.5, 2.0}) {
           const ScalingParams p{t, 1.0, 0.5, 0.5, 0.0};
           ScalingParams q = p;
           q.lambda = 1e-8;
           const auto a = theory::evaluate(p), b = theory::evaluate(q);
           worst = std::max({worst, std::abs(a.e_icl - b.e_icl) / a.e_icl, std::abs(a.e_idg - b.e_idg) / a.e_idg});
         }
         return worst < 1e-4 ? std::string() : fmt("worst_rel_diff", worst);
       }},
      {"limit_closed_forms",
       [] {
         const double a = theory::icl_limit_alpha_inf(0.5, 1.0, 0.1);
         const double b = theory::icl_limit_alpha_inf(2.0, 2.0, 0.1);
         const bool ok = std::abs(a - 0.8) < 1e-12 && std::abs(b - 0.3) < 1e-12 &&
                         std::isinf(theory::icl_limit_alpha_inf(0.5, 0.3, 0.1));
         return ok ? std::string() : fmt("value", a);
       }},
      {"dmmse_uniform_order_statistic",
       [] {
         double worst = 0.0;
         for (long k : {1L, 4L, 20L})
           worst = std::max(worst, std::abs(baselines::dmmse_gtask_alpha_inf(3, k) - 4.0 / (k + 1)));
         return worst < 1e-8 ? std::string() : fmt("worst_abs_diff", worst);
       }},
      {"primal_dual_ridge",
       [] {
         FiniteInstance inst;
         inst.d = 5;
         inst.n = 60;
         inst.ell = 5;
         inst.k = 6;
         inst.rho = 0.1;
         inst.lambda = 0.05;
         inst.seed = 11;
         const auto p = pretrain(inst, sim::RidgeRoute::primal).params.gamma;
         const auto d = pretrain(inst, sim::RidgeRoute::dual).params.gamma;
         const double rel = (p - d).norm() / p.norm();
         return rel < 1e-8 ? std::string() : fmt("rel_diff", rel);
       }},
      {"zero_gamma_population_error",
       [] {
         const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 5);
         const double e = sim::population_error(zero, sim::TestMoments<double>::icl(4), 1.0, 0.3);
         return std::abs(e - 1.3) < 1e-14 ? std::string() : fmt("error", e);
       }},
      {"csv_header",
       [] {
         std::ostringstream os;
         write_csv_header(os);
         const std::string golden =
             "d,tau,alpha,kappa,rho,lambda,seed,replicate,mode,e_icl,e_icl_se,e_idg,e_idg_se,g_task,"
             "e_icl_theory,e_idg_theory,wall_time_s,status\n";
         return os.str() == golden ? std::string() : "header=" + os.str();
       }},
  };
}

}  // namespace

bool run_selftest(std::ostream& os) {
  bool all = true;
  for (const auto& c : checks()) {
    std::string detail;
    try {
      detail = c.body();
    } catch (const std::exception& e) {
      detail = std::string("threw: ") + e.what();
    }
    os << (detail.empty() ? "PASS " : "FAIL ") << c.name;
    if (!detail.empty()) os << "  " << detail;
    os << '\n';
    all = all && detail.empty();
  }
  return all;
}

}  // namespace iclab::tools
