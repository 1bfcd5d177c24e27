#pragma once

#include <complex>

#include "cma/hermitian.hpp"

namespace cma {

// Discrete complex-analytic calculus. All second derivatives are second-order
// central differences; mixed real derivatives use the 4-point corner stencil,
// which keeps the complex Hessian exactly Hermitian. Real axis 2j carries
// x_j, axis 2j+1 carries y_j. Reading an undefined (NaN) node raises
// ErrorKind::BoundaryDataMissing.

double field_value(const ScalarField& u, std::size_t node);

double d1_axis_at(const ScalarField& u, std::size_t node, int axis);
double d2_axis_at(const ScalarField& u, std::size_t node, int axis);
double d2_mixed_at(const ScalarField& u, std::size_t node, int axis_a,
                   int axis_b);

/// d/dz_gamma = (d/dx - i d/dy)/2, central differences.
std::complex<double> dz_at(const ScalarField& u, std::size_t node, int gamma);

/// Squared Euclidean norm of the real 2m-gradient.
double grad_sq_real_at(const ScalarField& u, std::size_t node);

/// u_{j kbar} = (1/4)[(u_{x_j x_k} + u_{y_j y_k}) + i(u_{x_j y_k} - u_{y_j x_k})]
HermMat hessian_at(const ScalarField& u, std::size_t node);

/// Complex trace Delta u = sum_j u_{j jbar}; equals 1/4 of the real Laplacian.
double laplacian_at(const ScalarField& u, std::size_t node);

HermitianField complex_hessian(const ScalarField& u);
ScalarField complex_laplacian(const ScalarField& u);

}  // namespace cma
