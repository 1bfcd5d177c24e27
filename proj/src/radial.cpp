#include "cma/radial.hpp"

#include <algorithm>
#include <cmath>

namespace cma {

namespace {

// 8-point Gauss-Legendre on [-1, 1]
constexpr double kGlX[8] = {-0.9602898564975363, -0.7966664774136267,
                            -0.5255324099163290, -0.1834346424956498,
                            0.1834346424956498,  0.5255324099163290,
                            0.7966664774136267,  0.9602898564975363};
constexpr double kGlW[8] = {0.1012285362903763, 0.2223810344533745,
                            0.3137066458778873, 0.3626837833783620,
                            0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};

double gl_integrate(const std::function<double(double)>& fn, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0;
  for (int q = 0; q < 8; ++q) acc += kGlW[q] * fn(mid + half * kGlX[q]);
  return acc * half;
}

}  // namespace

RadialProfile::RadialProfile(std::function<double(double)> f_radial, int m,
                             double R, int panels)
    : f_(std::move(f_radial)), m_(m), r2_(R * R) {
  if (m != 1 && m != 2)
    throw Error(ErrorKind::DomainError, "radial oracle supports m in {1,2}");
  if (!(R > 0)) throw Error(ErrorKind::DomainError, "radius must be positive");

  knots_.resize(panels + 1);
  for (int j = 0; j <= panels; ++j) {
    double t = double(j) / panels;
    knots_[j] = r2_ * t * t;  // grading toward the degenerate end
  }

  auto mass_integrand = [this](double t) {
    double ft = f_(t);
    if (ft < 0)
      throw Error(ErrorKind::DomainError, "radial density negative at s = " +
                                              std::to_string(t));
    return m_ == 1 ? ft : t * ft;  // t^{m-1} f(t)
  };
  mass_.resize(panels + 1);
  mass_[0] = 0;
  for (int j = 1; j <= panels; ++j)
    mass_[j] = mass_[j - 1] + gl_integrate(mass_integrand, knots_[j - 1], knots_[j]);

  auto vp = [this](double s) { return v_prime(s); };
  vvals_.resize(panels + 1);
  vvals_[panels] = 0;
  for (int j = panels - 1; j >= 0; --j)
    vvals_[j] = vvals_[j + 1] - gl_integrate(vp, knots_[j], knots_[j + 1]);
}

double RadialProfile::cumulative_mass(double s) const {
  s = std::clamp(s, 0.0, r2_);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t j = std::min<std::size_t>(std::distance(knots_.begin(), it),
                                        knots_.size() - 1);
  double base = mass_[j - 1];
  auto mass_integrand = [this](double t) {
    return m_ == 1 ? f_(t) : t * f_(t);
  };
  return base + gl_integrate(mass_integrand, knots_[j - 1], s);
}

double RadialProfile::v_prime(double s) const {
  if (s <= 0) return std::pow(f_(0.0), 1.0 / m_);
  double root = std::pow(m_ * cumulative_mass(s), 1.0 / m_);
  return root / s;
}

double RadialProfile::v(double s) const {
  s = std::clamp(s, 0.0, r2_);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t j = std::min<std::size_t>(std::distance(knots_.begin(), it),
                                        knots_.size() - 1);
  auto vp = [this](double t) { return v_prime(t); };
  return vvals_[j - 1] + gl_integrate(vp, knots_[j - 1], s);
}

RadialProfile radial_oracle(std::function<double(double)> f_radial, int m,
                            double R) {
  return RadialProfile(std::move(f_radial), m, R);
}

}  // namespace cma
