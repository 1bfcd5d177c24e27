#include "cma/calculus.hpp"

#include <cmath>

namespace cma {

namespace {

double read(const ScalarField& u, std::size_t node, std::span<const int> delta) {
  std::size_t nb = u.domain->offset_node(node, delta);
  if (nb == GridDomain::npos)
    throw Error(ErrorKind::BoundaryDataMissing,
                "stencil leaves the lattice at node " + std::to_string(node),
                node);
  double v = u.values[nb];
  if (!std::isfinite(v))
    throw Error(ErrorKind::BoundaryDataMissing,
                "stencil reads an exterior node with no boundary value near node " +
                    std::to_string(node),
                node);
  return v;
}

}  // namespace

double field_value(const ScalarField& u, std::size_t node) {
  double v = u.values[node];
  if (!std::isfinite(v))
    throw Error(ErrorKind::BoundaryDataMissing,
                "field undefined at node " + std::to_string(node), node);
  return v;
}

double d1_axis_at(const ScalarField& u, std::size_t node, int axis) {
  const int d = u.domain->dims();
  int delta[4] = {0, 0, 0, 0};
  delta[axis] = 1;
  double up = read(u, node, std::span<const int>(delta, d));
  delta[axis] = -1;
  double dn = read(u, node, std::span<const int>(delta, d));
  return (up - dn) / (2 * u.domain->spacing());
}

double d2_axis_at(const ScalarField& u, std::size_t node, int axis) {
  const int d = u.domain->dims();
  int delta[4] = {0, 0, 0, 0};
  delta[axis] = 1;
  double up = read(u, node, std::span<const int>(delta, d));
  delta[axis] = -1;
  double dn = read(u, node, std::span<const int>(delta, d));
  double h = u.domain->spacing();
  return (up - 2 * field_value(u, node) + dn) / (h * h);
}

double d2_mixed_at(const ScalarField& u, std::size_t node, int axis_a,
                   int axis_b) {
  const int d = u.domain->dims();
  int delta[4] = {0, 0, 0, 0};
  auto corner = [&](int sa, int sb) {
    delta[axis_a] = sa;
    delta[axis_b] = sb;
    double v = read(u, node, std::span<const int>(delta, d));
    delta[axis_a] = 0;
    delta[axis_b] = 0;
    return v;
  };
  double h = u.domain->spacing();
  return (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) /
         (4 * h * h);
}

std::complex<double> dz_at(const ScalarField& u, std::size_t node, int gamma) {
  double dx = d1_axis_at(u, node, 2 * gamma);
  double dy = d1_axis_at(u, node, 2 * gamma + 1);
  return {0.5 * dx, -0.5 * dy};
}

double grad_sq_real_at(const ScalarField& u, std::size_t node) {
  double s = 0;
  for (int a = 0; a < u.domain->dims(); ++a) {
    double g = d1_axis_at(u, node, a);
    s += g * g;
  }
  return s;
}

HermMat hessian_at(const ScalarField& u, std::size_t node) {
  HermMat h;
  h.a11 = 0.25 * (d2_axis_at(u, node, 0) + d2_axis_at(u, node, 1));
  if (u.domain->m() == 2) {
    h.a22 = 0.25 * (d2_axis_at(u, node, 2) + d2_axis_at(u, node, 3));
    h.re12 = 0.25 * (d2_mixed_at(u, node, 0, 2) + d2_mixed_at(u, node, 1, 3));
    h.im12 = 0.25 * (d2_mixed_at(u, node, 0, 3) - d2_mixed_at(u, node, 1, 2));
  }
  return h;
}

double laplacian_at(const ScalarField& u, std::size_t node) {
  double lap = 0.25 * (d2_axis_at(u, node, 0) + d2_axis_at(u, node, 1));
  if (u.domain->m() == 2)
    lap += 0.25 * (d2_axis_at(u, node, 2) + d2_axis_at(u, node, 3));
  return lap;
}

HermitianField complex_hessian(const ScalarField& u) {
  HermitianField out(u.domain);
  for (std::size_t nd : u.domain->interior_nodes()) out[nd] = hessian_at(u, nd);
  return out;
}

ScalarField complex_laplacian(const ScalarField& u) {
  ScalarField out(u.domain);
  for (std::size_t nd : u.domain->interior_nodes())
    out[nd] = laplacian_at(u, nd);
  return out;
}

}  // namespace cma
