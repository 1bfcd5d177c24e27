#include "cma/hermitian.hpp"

#include <cmath>
#include <limits>

namespace cma {

double HermMat::min_eig(int m) const {
  if (m == 1) return a11;
  double mid = 0.5 * (a11 + a22);
  double rad = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + re12 * re12 +
                         im12 * im12);
  return mid - rad;
}

double HermMat::max_eig(int m) const {
  if (m == 1) return a11;
  double mid = 0.5 * (a11 + a22);
  double rad = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + re12 * re12 +
                         im12 * im12);
  return mid + rad;
}

std::array<double, 2> HermMat::eigenvalues(int m) const {
  if (m == 1) return {a11, 0.0};
  return {min_eig(2), max_eig(2)};
}

HermMat HermMat::inverse(int m) const {
  double d = det(m);
  if (m == 1) return {1.0 / d, 0, 0, 0};
  return {a22 / d, a11 / d, -re12 / d, -im12 / d};
}

std::array<std::complex<double>, 4> HermMat::eigenbasis2() const {
  using C = std::complex<double>;
  auto ev = eigenvalues(2);
  C off{re12, im12};
  std::array<C, 4> U;  // column-major: U[0],U[1] first column
  if (std::abs(off) < 1e-300) {
    bool swap = a11 > a22;
    U = swap ? std::array<C, 4>{0, 1, 1, 0} : std::array<C, 4>{1, 0, 0, 1};
    return U;
  }
  for (int c = 0; c < 2; ++c) {
    // (A - lambda I) v = 0  ->  v = (off, lambda - a11)
    C v0 = off, v1 = C(ev[c] - a11, 0);
    double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
    U[2 * c] = v0 / nrm;
    U[2 * c + 1] = v1 / nrm;
  }
  return U;
}

DetInvResult hermitian_det_inv(const HermitianField& hf) {
  const int m = hf.m();
  DetInvResult out{ScalarField(hf.domain), HermitianField(hf.domain), {}};
  for (std::size_t nd : hf.domain->interior_nodes()) {
    const HermMat& a = hf[nd];
    double d = a.det(m);
    out.det[nd] = d;
    if (d == 0.0) {
      out.singular_nodes.push_back(nd);
      continue;
    }
    out.inverse[nd] = a.inverse(m);
  }
  return out;
}

std::pair<Positivity, double> classify_positivity(const HermitianField& hf,
                                                  double definite_floor) {
  const int m = hf.m();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t nd : hf.domain->interior_nodes())
    lo = std::min(lo, hf[nd].min_eig(m));
  Positivity p = Positivity::None;
  if (lo >= 0.0) p = Positivity::SemiDefinite;
  if (lo > definite_floor) p = Positivity::Definite;
  return {p, lo};
}

}  // namespace cma
