#pragma once

#include <optional>

#include "cma/calculus.hpp"

namespace cma {

/// m = 1 collapses the density exponents: the equation det u_{1 1bar} = f is
/// linear there, so 1/(m-1) and m-1 are both read as 1 and 1/m as 1.
double density_root_exponent(int m);  // 1/(m-1), m = 1 -> 1

struct ConditionReport {
  int m = 0;
  double sup_f = 0;
  double a_const = 0;   // A  = max(0, -inf Delta f^{1/(m-1)})
  double a1_const = 0;  // A1 = sup |grad f^{1/m}|
  std::size_t sup_f_node = 0, a_node = 0, a1_node = 0;
  bool nonnegative = false;
  bool strictly_positive = false;
};

/// Extrema are taken over deep-interior nodes (full stencil neighborhood
/// interior) so the composed powers always differentiate cleanly. Where f = 0
/// the powers are evaluated as 0 and differenced like any other field.
ConditionReport check_conditions(const ScalarField& f);

/// Node-wise residual of
///   Delta f^{1/(m-1)} - (1/(m-1)) f^{1/(m-1)-2} [ f Delta f - ((m-2)/(m-1)) |grad f|^2 ]
/// with the complex-gradient normalization |grad f|^2 = sum_k |f_k|^2 and all
/// operators discrete. Requires m >= 2 and f > 0.
ScalarField equivalence_identity_residual(const ScalarField& f);

struct RegularizationSchedule {
  std::vector<double> eps;         // strictly decreasing, positive
  std::vector<double> rho_over_h;  // strictly decreasing, >= 1

  void validate() const;
};

struct MollifierKernel {
  std::vector<std::array<int, 4>> offsets;
  std::vector<double> weights;  // nonnegative, sum exactly 1 after renorm
  double rho = 0;
};

/// Discrete radial bump gamma(r) ~ exp(-1/(1-r^2)) of support radius rho,
/// normalized to unit mass on the lattice.
MollifierKernel build_kernel(const GridDomain& dom, double rho);

/// h_{eps,rho} = (gamma_rho * (f^{1/(m-1)} + eps))^{m-1}.
/// f is extended beyond the domain before convolving: nodes without a value
/// copy the nearest boundary-band value along the ray to the domain center
/// (expression-sampled fields already carry their own values on the padding
/// and keep them). The result is >= eps^{m-1} everywhere it is defined.
ScalarField mollify_lift(const ScalarField& f, double eps, double rho);

/// The extension described above, exposed for tests.
ScalarField extend_field(const ScalarField& f);

}  // namespace cma
