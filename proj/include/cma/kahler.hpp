#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "cma/hermitian.hpp"

namespace cma {

using Cplx = std::complex<double>;
using ChartPoint = std::array<Cplx, 2>;  // second entry unused when m = 1

/// R_{i jbar k lbar} for m <= 2, coordinate frame, row-major on (i,j,k,l).
struct CurvTensor {
  int m = 1;
  std::array<Cplx, 16> r{};

  Cplx& at(int i, int j, int k, int l) { return r[((i * m + j) * m + k) * m + l]; }
  Cplx at(int i, int j, int k, int l) const {
    return r[((i * m + j) * m + k) * m + l];
  }
};

/// Closed-form model metrics. Fubini-Study satisfies the nonnegative
/// orthogonal bisectional curvature condition; the Poincare disk is the
/// negative control. Curvature sign convention:
///   R_{i jbar k lbar} = -d_k d_lbar g_{i jbar} + g^{p qbar} (d_k g_{i qbar})(d_lbar g_{p jbar}),
/// which makes Fubini-Study curvature +(g g + g g).
class MetricModel {
 public:
  enum class Kind { Flat, FubiniStudy, ProductFlatFS, PoincareDisk };

  static MetricModel flat(int m);
  static MetricModel fubini_study(int m);
  static MetricModel product_flat_fs();  // flat C x FS P^1, m = 2
  static MetricModel poincare_disk();    // m = 1
  static MetricModel by_name(const std::string& name);
  static std::vector<std::string> known_names();

  Kind kind() const { return kind_; }
  int m() const { return m_; }
  const std::string& name() const { return name_; }
  /// True when the model is documented as satisfying the orthogonal
  /// bisectional curvature condition (the Poincare disk is not).
  bool documented_obc() const { return kind_ != Kind::PoincareDisk; }

  bool chart_contains(const ChartPoint& z) const;
  HermMat metric_at(const ChartPoint& z) const;
  CurvTensor curvature_components(const ChartPoint& z) const;
  /// Kahler potential (used by the finite-difference oracle in tests).
  double potential(const ChartPoint& z) const;

 private:
  Kind kind_ = Kind::Flat;
  int m_ = 1;
  std::string name_;
};

struct CurvatureSample {
  ChartPoint point;
  CurvTensor frame_tensor;  // orthonormalized at the point
  double scalar_s = 0;      // S = sum_{i,k} R_{i ibar k kbar}, orthonormal frame
  double obc_min = 0;       // min over sampled frames of R(e_i, e_i, e_j, e_j)
};

/// Orthonormalizes the coordinate frame against g (Gram-Schmidt) and returns
/// the curvature tensor in that frame together with S.
CurvatureSample curvature_at(const MetricModel& metric, const ChartPoint& z);

struct ObcResult {
  bool pass = false;
  double obc_min = 0;
};

/// Samples Haar-random unitary frames (plus the coordinate frame and fixed
/// 2-plane rotations) at every point; threshold -1e-9. For the models here
/// closed-form positivity is known, so the sampling is a sanity harness, not
/// a decision procedure.
ObcResult obc_check(const MetricModel& metric,
                    std::span<const ChartPoint> points, int frames_per_point,
                    std::uint64_t seed);

/// Deterministic chart sample points for a model.
std::vector<ChartPoint> default_sample_points(const MetricModel& metric,
                                              int count, std::uint64_t seed);

}  // namespace cma
