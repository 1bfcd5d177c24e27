#pragma once

#include <complex>
#include <vector>

#include "cma/grid.hpp"

namespace cma {

/// One m x m complex Hermitian matrix, m <= 2. Diagonal is real by
/// construction; the single off-diagonal entry is stored split, so the matrix
/// equals its conjugate transpose exactly, not just to tolerance.
/// m = 1 uses a11 only.
struct HermMat {
  double a11 = 0, a22 = 0, re12 = 0, im12 = 0;

  std::complex<double> off() const { return {re12, im12}; }

  double trace(int m) const { return m == 1 ? a11 : a11 + a22; }
  double det(int m) const {
    return m == 1 ? a11 : a11 * a22 - (re12 * re12 + im12 * im12);
  }
  double min_eig(int m) const;
  double max_eig(int m) const;
  /// trace of the inverse: sum of g^{i ibar} over the diagonal.
  double trace_inv(int m) const { return m == 1 ? 1.0 / a11 : trace(m) / det(m); }
  HermMat inverse(int m) const;
  HermMat plus_identity(double t = 1.0) const {
    return {a11 + t, a22 + t, re12, im12};
  }
  /// trace(this * B), real for Hermitian pairs.
  double contract(const HermMat& b, int m) const {
    if (m == 1) return a11 * b.a11;
    return a11 * b.a11 + a22 * b.a22 + 2 * (re12 * b.re12 + im12 * b.im12);
  }
  /// Eigenvalues ascending (m = 1: second entry unused).
  std::array<double, 2> eigenvalues(int m) const;
  /// Unitary eigenbasis columns for m = 2 (ascending eigenvalue order).
  std::array<std::complex<double>, 4> eigenbasis2() const;
};

enum class Positivity { None, SemiDefinite, Definite };

/// Per-interior-node Hermitian matrix field.
struct HermitianField {
  DomainPtr domain;
  std::vector<HermMat> values;
  Positivity positivity = Positivity::None;

  HermitianField() = default;
  explicit HermitianField(DomainPtr dom)
      : domain(std::move(dom)), values(domain->lattice_size()) {}

  int m() const { return domain->m(); }
  const HermMat& operator[](std::size_t node) const { return values[node]; }
  HermMat& operator[](std::size_t node) { return values[node]; }
};

struct DetInvResult {
  ScalarField det;
  HermitianField inverse;
  std::vector<std::size_t> singular_nodes;
};

/// Closed-form determinant and adjugate inverse per interior node.
/// Singular nodes are flagged and skipped, not fatal: degenerate runs hit them.
DetInvResult hermitian_det_inv(const HermitianField& hf);

/// Classifies the field and returns the smallest eigenvalue over interior.
std::pair<Positivity, double> classify_positivity(const HermitianField& hf,
                                                  double definite_floor = 0.0);

}  // namespace cma
