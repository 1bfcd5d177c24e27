#include "cma/rhs_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cma {

double density_root_exponent(int m) { return m == 1 ? 1.0 : 1.0 / (m - 1); }

namespace {

void require_density(const ScalarField& f) {
  const auto& dom = *f.domain;
  for (std::size_t nd = 0; nd < dom.lattice_size(); ++nd) {
    if (dom.node_class(nd) == NodeClass::Exterior) continue;
    double v = f[nd];
    if (!std::isfinite(v))
      throw Error(ErrorKind::InvalidDensity,
                  "density undefined at node " + std::to_string(nd), nd);
    if (v < 0)
      throw Error(ErrorKind::InvalidDensity,
                  "density negative at node " + std::to_string(nd), nd);
  }
}

ScalarField power_field(const ScalarField& f, double p) {
  ScalarField out(f.domain);
  for (std::size_t nd = 0; nd < f.values.size(); ++nd) {
    double v = f[nd];
    if (std::isfinite(v)) out[nd] = std::pow(v, p);
  }
  return out;
}

}  // namespace

ConditionReport check_conditions(const ScalarField& f) {
  require_density(f);
  const auto& dom = *f.domain;
  const int m = dom.m();

  ConditionReport rep;
  rep.m = m;
  rep.nonnegative = true;
  rep.strictly_positive = true;
  rep.sup_f = -1;
  for (std::size_t nd = 0; nd < dom.lattice_size(); ++nd) {
    if (dom.node_class(nd) == NodeClass::Exterior) continue;
    double v = f[nd];
    if (v <= 0) rep.strictly_positive = false;
    if (v > rep.sup_f) {
      rep.sup_f = v;
      rep.sup_f_node = nd;
    }
  }

  ScalarField root_m1 = power_field(f, density_root_exponent(m));
  ScalarField root_m = power_field(f, 1.0 / m);

  double min_lap = std::numeric_limits<double>::infinity();
  double max_grad = -1;
  for (std::size_t nd : dom.deep_interior_nodes()) {
    double lap = laplacian_at(root_m1, nd);
    if (lap < min_lap) {
      min_lap = lap;
      rep.a_node = nd;
    }
    double g = std::sqrt(grad_sq_real_at(root_m, nd));
    if (g > max_grad) {
      max_grad = g;
      rep.a1_node = nd;
    }
  }
  if (dom.deep_interior_nodes().empty())
    throw Error(ErrorKind::DomainError,
                "domain has no deep-interior node for condition extrema");
  rep.a_const = std::max(0.0, -min_lap);
  rep.a1_const = max_grad;
  return rep;
}

ScalarField equivalence_identity_residual(const ScalarField& f) {
  const auto& dom = *f.domain;
  const int m = dom.m();
  if (m < 2)
    throw Error(ErrorKind::DomainError,
                "equivalence identity needs m >= 2 (the exponent 1/(m-1))");
  for (std::size_t nd = 0; nd < dom.lattice_size(); ++nd) {
    if (dom.node_class(nd) == NodeClass::Exterior) continue;
    if (!(f[nd] > 0))
      throw Error(ErrorKind::DomainError,
                  "identity requires f > 0, violated at node " + std::to_string(nd),
                  nd);
  }
  const double p = 1.0 / (m - 1);
  ScalarField fp = power_field(f, p);
  ScalarField out(f.domain);
  for (std::size_t nd : dom.interior_nodes()) {
    double lhs = laplacian_at(fp, nd);
    double lap_f = laplacian_at(f, nd);
    double grad_c2 = 0.25 * grad_sq_real_at(f, nd);  // sum_k |f_k|^2
    double fv = f[nd];
    double rhs = p * std::pow(fv, p - 2.0) *
                 (fv * lap_f - ((m - 2.0) / (m - 1.0)) * grad_c2);
    out[nd] = lhs - rhs;
  }
  return out;
}

void RegularizationSchedule::validate() const {
  auto strictly_decreasing_positive = [](const std::vector<double>& xs) {
    if (xs.empty()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(xs[i] > 0)) return false;
      if (i > 0 && !(xs[i] < xs[i - 1])) return false;
    }
    return true;
  };
  if (!strictly_decreasing_positive(eps))
    throw Error(ErrorKind::DomainError,
                "epsilon schedule must be strictly decreasing and positive");
  if (!strictly_decreasing_positive(rho_over_h) || rho_over_h.back() < 1.0)
    throw Error(ErrorKind::DomainError,
                "rho schedule must be strictly decreasing with rho >= h");
}

MollifierKernel build_kernel(const GridDomain& dom, double rho) {
  const double h = dom.spacing();
  if (rho < h - 1e-12 * h)
    throw Error(ErrorKind::KernelUnderresolved,
                "kernel support rho < grid spacing h");
  MollifierKernel k;
  k.rho = rho;
  const int d = dom.dims();
  const int reach = static_cast<int>(std::floor(rho / h + 1e-12));
  std::array<int, 4> delta{0, 0, 0, 0};
  std::size_t center_slot = 0;
  auto visit = [&](auto&& self, int axis) -> void {
    if (axis == d) {
      double r2 = 0;
      for (int a = 0; a < d; ++a) r2 += double(delta[a]) * delta[a];
      double r = std::sqrt(r2) * h / rho;
      if (r >= 1.0) return;
      bool is_center = r2 == 0;
      if (is_center) center_slot = k.offsets.size();
      k.offsets.push_back(delta);
      k.weights.push_back(std::exp(-1.0 / (1.0 - r * r)));
      return;
    }
    for (int s = -reach; s <= reach; ++s) {
      delta[axis] = s;
      self(self, axis + 1);
    }
    delta[axis] = 0;
  };
  visit(visit, 0);

  double total = pairwise_sum(k.weights);
  for (auto& w : k.weights) w /= total;
  // Nudge the center weight until the pairwise sum is exactly one.
  for (int pass = 0; pass < 8; ++pass) {
    double s = pairwise_sum(k.weights);
    if (s == 1.0) break;
    k.weights[center_slot] += 1.0 - s;
  }
  return k;
}

ScalarField extend_field(const ScalarField& f) {
  const auto& dom = *f.domain;
  ScalarField out = f;
  const int d = dom.dims();
  for (std::size_t nd = 0; nd < dom.lattice_size(); ++nd) {
    if (std::isfinite(out[nd])) continue;
    if (dom.periodic())
      throw Error(ErrorKind::BoundaryDataMissing,
                  "torus field undefined at node " + std::to_string(nd), nd);
    auto pos = dom.position(nd);
    const auto& c = dom.center();
    double dist = dom.dist_to_center(nd);
    double target = dom.shape() == Shape::Ball ? dom.radius() : dist;
    double filled = std::numeric_limits<double>::quiet_NaN();
    // Walk inward along the ray until a node with data appears.
    for (int step = 0; step < 4 * dom.lattice_per_axis(); ++step) {
      double t = dist > 0 ? target / dist : 0.0;
      int idx[4];
      for (int a = 0; a < d; ++a) {
        double x = c[a] + t * (pos[a] - c[a]);
        double rel = (x - (dom.coord(0, a))) / dom.spacing();
        idx[a] = std::clamp(static_cast<int>(std::lround(rel)), 0,
                            dom.lattice_per_axis() - 1);
      }
      std::size_t probe = dom.flatten(std::span<const int>(idx, d));
      if (std::isfinite(f[probe])) {
        filled = f[probe];
        break;
      }
      target -= 0.5 * dom.spacing();
      if (target <= 0) break;
    }
    if (!std::isfinite(filled))
      throw Error(ErrorKind::BoundaryDataMissing,
                  "cannot extend field to node " + std::to_string(nd), nd);
    out[nd] = filled;
  }
  return out;
}

ScalarField mollify_lift(const ScalarField& f, double eps, double rho) {
  if (!(eps > 0))
    throw Error(ErrorKind::DomainError, "mollify_lift needs eps > 0");
  require_density(f);
  const auto& dom = *f.domain;
  const int m = dom.m();
  const int d = dom.dims();
  MollifierKernel kernel = build_kernel(dom, rho);

  ScalarField g = power_field(f, density_root_exponent(m));
  for (auto& v : g.values)
    if (std::isfinite(v)) v += eps;
  ScalarField gext = extend_field(g);

  const int L = dom.lattice_per_axis();
  ScalarField out(f.domain);
  const double outer = m == 1 ? 1.0 : double(m - 1);
  for (std::size_t nd = 0; nd < dom.lattice_size(); ++nd) {
    if (dom.node_class(nd) == NodeClass::Exterior) continue;
    auto idx = dom.unflatten(nd);
    double acc = 0;
    for (std::size_t k = 0; k < kernel.offsets.size(); ++k) {
      int tgt[4];
      for (int a = 0; a < d; ++a) {
        int i = idx[a] + kernel.offsets[k][a];
        if (dom.periodic()) {
          i %= L;
          if (i < 0) i += L;
        } else {
          i = std::clamp(i, 0, L - 1);
        }
        tgt[a] = i;
      }
      acc += kernel.weights[k] * gext[dom.flatten(std::span<const int>(tgt, d))];
    }
    acc = std::max(acc, eps);  // h >= eps^{m-1} holds exactly
    out[nd] = outer == 1.0 ? acc : std::pow(acc, outer);
  }
  return out;
}

}  // namespace cma
