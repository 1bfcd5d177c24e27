#pragma once

#include <string>

#include "cma/rhs_lab.hpp"

namespace cma {

struct SolveOptions {
  int max_iterations = 50;
  double tolerance = 1e-10;  // sup-norm of the log-det residual
  double shrink = 0.5;       // line-search backoff factor
  double min_step = 1e-6;
  double eig_floor = 1e-10;  // positivity floor for the Hessian iterate
  enum class Init { Barrier, Zero, Supplied } init = Init::Barrier;

  void validate() const;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  /// sup residual at start and after each accepted step; non-increasing
  /// after the first accepted step by the line-search contract.
  std::vector<double> residual_history;
  double final_residual = 0;
  std::size_t node_count = 0;
  double min_hessian_eig = 0;
  double wall_seconds = 0;  // printed, never persisted (reports stay byte-stable)
};

/// psi(z) = K (|z - c|^2 - R^2) with K = sup_f^{1/m} + 1: strictly
/// plurisubharmonic, det psi_{i jbar} = K^m > sup f, psi = 0 on the sphere.
/// Box domains use the enclosing ball.
ScalarField build_barrier(const DomainPtr& dom, double sup_f);

/// Damped Newton for det u_{i jbar} = f, u = 0 on the boundary, on ball and
/// box domains. Boundary-band values are solved alongside the interior ones:
/// each band node is tied to the sphere value 0 and two interior samples by a
/// radial quadratic (box bands pin u = 0 exactly). Steps are accepted only
/// while the Hessian stays uniformly positive and the sup residual decreases.
std::pair<ScalarField, SolveReport> solve_dirichlet(const ScalarField& f,
                                                    const SolveOptions& opts,
                                                    const ScalarField* warm = nullptr);

struct TorusSolution {
  ScalarField phi;
  double c = 0;  // normalization: det(I + phi_{i jbar}) = e^c f, mean det = 1
  SolveReport report;
};

/// Newton on the augmented system (phi, c) with mean(phi) = 0 pinning the
/// additive gauge.
TorusSolution solve_torus(const ScalarField& f, const SolveOptions& opts,
                          const ScalarField* warm = nullptr);

struct StageRecord {
  int stage = 0;
  double eps = 0;
  double rho_over_h = 0;
  SolveReport report;
  double sup_abs_u = 0;
  double sup_grad_u = 0;
  double sup_lap_u = 0;   // ||Delta u||_inf, complex trace
  double c1_norm = 0;     // sup|u| + sup|grad u|
  double sup_lap_running_max = 0;
};

struct PipelineResult {
  std::vector<StageRecord> stages;
  std::vector<ScalarField> stage_fields;
  ScalarField limit;  // last completed stage
  bool completed = false;
  std::string halt_reason;
};

/// The section-4 continuation: for each eps (descending) and rho (descending
/// inside), solve det u = h_{eps,rho} warm-started from the previous stage.
/// A failed inner solve halts the pipeline and returns the partial history.
PipelineResult degenerate_pipeline(const ScalarField& f,
                                   const RegularizationSchedule& sched,
                                   const SolveOptions& opts);

}  // namespace cma
