#include "cma/solver.hpp"

#include <cmath>
#include <limits>

#include "cma/calculus.hpp"

namespace cma {

namespace {

void stage_norms(const ScalarField& u, StageRecord& rec) {
  const auto& dom = *u.domain;
  double sup_u = 0, sup_grad = 0, sup_lap = 0;
  double min_eig = std::numeric_limits<double>::infinity();
  const int m = dom.m();
  for (std::size_t nd : dom.interior_nodes()) {
    sup_u = std::max(sup_u, std::abs(u[nd]));
    sup_grad = std::max(sup_grad, std::sqrt(grad_sq_real_at(u, nd)));
    HermMat hm = hessian_at(u, nd);
    sup_lap = std::max(sup_lap, std::abs(hm.trace(m)));
    min_eig = std::min(min_eig, hm.min_eig(m));
  }
  rec.sup_abs_u = sup_u;
  rec.sup_grad_u = sup_grad;
  rec.sup_lap_u = sup_lap;
  rec.c1_norm = sup_u + sup_grad;
}

}  // namespace

PipelineResult degenerate_pipeline(const ScalarField& f,
                                   const RegularizationSchedule& sched,
                                   const SolveOptions& opts) {
  sched.validate();
  check_conditions(f);  // throws on invalid densities
  DomainPtr dom = f.domain;
  const double h = dom->spacing();

  PipelineResult result;
  ScalarField current;
  bool have_warm = false;
  double running_max = 0;
  int stage = 0;

  for (double eps : sched.eps) {
    for (double rho_h : sched.rho_over_h) {
      StageRecord rec;
      rec.stage = stage;
      rec.eps = eps;
      rec.rho_over_h = rho_h;
      ScalarField lifted = mollify_lift(f, eps, rho_h * h);
      try {
        SolveOptions stage_opts = opts;
        if (have_warm) stage_opts.init = SolveOptions::Init::Supplied;
        auto [u, rep] = solve_dirichlet(lifted, stage_opts,
                                        have_warm ? &current : nullptr);
        rec.report = rep;
        if (!rep.converged) {
          result.stages.push_back(rec);
          result.halt_reason = "stage " + std::to_string(stage) +
                               " did not converge (residual " +
                               std::to_string(rep.final_residual) + ")";
          result.limit = std::move(current);
          return result;
        }
        current = std::move(u);
        have_warm = true;
      } catch (const Error& err) {
        result.stages.push_back(rec);
        result.halt_reason = "stage " + std::to_string(stage) + ": " + err.what();
        result.limit = std::move(current);
        return result;
      }
      stage_norms(current, rec);
      running_max = std::max(running_max, rec.sup_lap_u);
      rec.sup_lap_running_max = running_max;
      result.stages.push_back(rec);
      result.stage_fields.push_back(current);
      ++stage;
    }
  }
  result.limit = std::move(current);
  result.completed = true;
  return result;
}

}  // namespace cma
