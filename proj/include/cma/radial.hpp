#pragma once

#include <functional>
#include <vector>

#include "cma/errors.hpp"

namespace cma {

/// Closed-form radial reduction of det u_{i jbar} = f for u = v(|z|^2):
/// d/ds [ (s v')^m ] = m s^{m-1} f(s), so
///   s v'(s) = ( m * int_0^s t^{m-1} f(t) dt )^{1/m},
/// integrated with composite Gauss-Legendre on a mesh graded toward s = 0
/// (f may vanish there) and shifted so v(R^2) = 0.
class RadialProfile {
 public:
  RadialProfile(std::function<double(double)> f_radial, int m, double R,
                int panels = 800);

  double v(double s) const;
  double v_prime(double s) const;
  double R2() const { return r2_; }

 private:
  double cumulative_mass(double s) const;  // int_0^s t^{m-1} f dt

  std::function<double(double)> f_;
  int m_;
  double r2_;
  std::vector<double> knots_;   // graded partition of [0, R^2]
  std::vector<double> mass_;    // cumulative integral at knots
  std::vector<double> vvals_;   // v at knots (v(R^2) = 0)
};

RadialProfile radial_oracle(std::function<double(double)> f_radial, int m,
                            double R);

}  // namespace cma
