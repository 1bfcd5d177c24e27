#include "cma/kahler.hpp"

#include <cmath>
#include <limits>

#include "cma/rng.hpp"

namespace cma {

namespace {

double abs2(const Cplx& z) { return std::norm(z); }

double chart_norm2(const ChartPoint& z, int m) {
  double s = abs2(z[0]);
  if (m == 2) s += abs2(z[1]);
  return s;
}

}  // namespace

MetricModel MetricModel::flat(int m) {
  MetricModel mm;
  mm.kind_ = Kind::Flat;
  mm.m_ = m;
  mm.name_ = m == 1 ? "flat-1" : "flat";
  return mm;
}

MetricModel MetricModel::fubini_study(int m) {
  MetricModel mm;
  mm.kind_ = Kind::FubiniStudy;
  mm.m_ = m;
  mm.name_ = m == 1 ? "fubini-study-1" : "fubini-study-2";
  return mm;
}

MetricModel MetricModel::product_flat_fs() {
  MetricModel mm;
  mm.kind_ = Kind::ProductFlatFS;
  mm.m_ = 2;
  mm.name_ = "product-flat-fs";
  return mm;
}

MetricModel MetricModel::poincare_disk() {
  MetricModel mm;
  mm.kind_ = Kind::PoincareDisk;
  mm.m_ = 1;
  mm.name_ = "poincare-disk";
  return mm;
}

MetricModel MetricModel::by_name(const std::string& name) {
  if (name == "flat" || name == "flat-2") return flat(2);
  if (name == "flat-1") return flat(1);
  if (name == "fubini-study-1") return fubini_study(1);
  if (name == "fubini-study-2") return fubini_study(2);
  if (name == "product-flat-fs") return product_flat_fs();
  if (name == "poincare-disk") return poincare_disk();
  throw Error(ErrorKind::ParseError, "unknown metric model '" + name + "'");
}

std::vector<std::string> MetricModel::known_names() {
  return {"flat", "flat-1", "fubini-study-1", "fubini-study-2",
          "product-flat-fs", "poincare-disk"};
}

bool MetricModel::chart_contains(const ChartPoint& z) const {
  if (kind_ == Kind::PoincareDisk) return abs2(z[0]) < 1.0 - 1e-9;
  return std::isfinite(chart_norm2(z, m_));
}

HermMat MetricModel::metric_at(const ChartPoint& z) const {
  if (!chart_contains(z))
    throw Error(ErrorKind::ChartDomain, "point outside chart of " + name_);
  switch (kind_) {
    case Kind::Flat: {
      HermMat g{1, 1, 0, 0};
      if (m_ == 1) g.a22 = 0;
      return g;
    }
    case Kind::FubiniStudy: {
      double w = 1.0 + chart_norm2(z, m_);
      HermMat g;
      g.a11 = (w - abs2(z[0])) / (w * w);
      if (m_ == 2) {
        g.a22 = (w - abs2(z[1])) / (w * w);
        Cplx off = -std::conj(z[0]) * z[1] / (w * w);  // g_{1 2bar}
        g.re12 = off.real();
        g.im12 = off.imag();
      }
      return g;
    }
    case Kind::ProductFlatFS: {
      double w = 1.0 + abs2(z[1]);
      return {1.0, 1.0 / (w * w), 0, 0};
    }
    case Kind::PoincareDisk: {
      double w = 1.0 - abs2(z[0]);
      return {1.0 / (w * w), 0, 0, 0};
    }
  }
  return {};
}

double MetricModel::potential(const ChartPoint& z) const {
  switch (kind_) {
    case Kind::Flat: return chart_norm2(z, m_);
    case Kind::FubiniStudy: return std::log(1.0 + chart_norm2(z, m_));
    case Kind::ProductFlatFS: return abs2(z[0]) + std::log(1.0 + abs2(z[1]));
    case Kind::PoincareDisk: return -std::log(1.0 - abs2(z[0]));
  }
  return 0;
}

CurvTensor MetricModel::curvature_components(const ChartPoint& z) const {
  if (!chart_contains(z))
    throw Error(ErrorKind::ChartDomain, "point outside chart of " + name_);
  CurvTensor t;
  t.m = m_;
  switch (kind_) {
    case Kind::Flat:
      break;
    case Kind::FubiniStudy: {
      // Constant holomorphic bisectional curvature:
      // R_{i jbar k lbar} = g_{i jbar} g_{k lbar} + g_{i lbar} g_{k jbar}.
      HermMat g = metric_at(z);
      auto gij = [&](int i, int j) -> Cplx {
        if (i == j) return i == 0 ? g.a11 : g.a22;
        return i == 0 ? g.off() : std::conj(g.off());
      };
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j)
          for (int k = 0; k < m_; ++k)
            for (int l = 0; l < m_; ++l)
              t.at(i, j, k, l) = gij(i, j) * gij(k, l) + gij(i, l) * gij(k, j);
      break;
    }
    case Kind::ProductFlatFS: {
      double g22 = metric_at(z).a22;
      t.at(1, 1, 1, 1) = 2.0 * g22 * g22;
      break;
    }
    case Kind::PoincareDisk: {
      double g = metric_at(z).a11;
      t.at(0, 0, 0, 0) = -2.0 * g * g;
      break;
    }
  }
  return t;
}

namespace {

/// Columns of E = L^{-H} where g = L L^H: the Gram-Schmidt orthonormal frame.
std::array<Cplx, 4> orthonormal_frame(const HermMat& g, int m) {
  double l11 = std::sqrt(g.a11);
  std::array<Cplx, 4> e{};  // column-major 2x2
  e[0] = 1.0 / l11;
  if (m == 2) {
    Cplx l21 = std::conj(g.off()) / l11;  // g_{2 1bar} / l11
    double l22 = std::sqrt(g.a22 - std::norm(l21));
    e[2] = -std::conj(l21) / (l11 * l22);
    e[3] = 1.0 / l22;
  }
  return e;
}

double frame_value(const CurvTensor& t, std::span<const Cplx> v,
                   std::span<const Cplx> w) {
  Cplx acc = 0;
  for (int i = 0; i < t.m; ++i)
    for (int j = 0; j < t.m; ++j)
      for (int k = 0; k < t.m; ++k)
        for (int l = 0; l < t.m; ++l)
          acc += t.at(i, j, k, l) * v[i] * std::conj(v[j]) * w[k] * std::conj(w[l]);
  return acc.real();
}

double min_over_frame(const CurvTensor& t, const std::array<Cplx, 4>& cols) {
  double lo = std::numeric_limits<double>::infinity();
  std::array<Cplx, 2> va, vb;
  for (int a = 0; a < t.m; ++a)
    for (int b = 0; b < t.m; ++b) {
      va = {cols[2 * a], cols[2 * a + 1]};
      vb = {cols[2 * b], cols[2 * b + 1]};
      lo = std::min(lo, frame_value(t, va, vb));
    }
  return lo;
}

std::array<Cplx, 4> apply_unitary(const std::array<Cplx, 4>& e,
                                  const std::array<Cplx, 4>& u) {
  std::array<Cplx, 4> out{};
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 2; ++r)
      out[2 * c + r] = e[r] * u[2 * c] + e[2 + r] * u[2 * c + 1];
  return out;
}

std::array<Cplx, 4> haar_unitary2(Rng& rng) {
  std::array<Cplx, 4> a;
  for (auto& z : a) z = Cplx(rng.gaussian(), rng.gaussian());
  // Gram-Schmidt with R-diagonal phase fix.
  double n0 = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
  Cplx c0 = a[0] / n0, c1 = a[1] / n0;
  Cplx proj = std::conj(c0) * a[2] + std::conj(c1) * a[3];
  Cplx d0 = a[2] - proj * c0, d1 = a[3] - proj * c1;
  double n1 = std::sqrt(std::norm(d0) + std::norm(d1));
  d0 /= n1;
  d1 /= n1;
  return {c0, c1, d0, d1};
}

}  // namespace

CurvatureSample curvature_at(const MetricModel& metric, const ChartPoint& z) {
  CurvatureSample sample;
  sample.point = z;
  CurvTensor raw = metric.curvature_components(z);
  auto e = orthonormal_frame(metric.metric_at(z), metric.m());
  CurvTensor ft;
  ft.m = metric.m();
  for (int a = 0; a < ft.m; ++a)
    for (int b = 0; b < ft.m; ++b)
      for (int c = 0; c < ft.m; ++c)
        for (int d = 0; d < ft.m; ++d) {
          Cplx acc = 0;
          for (int i = 0; i < ft.m; ++i)
            for (int j = 0; j < ft.m; ++j)
              for (int k = 0; k < ft.m; ++k)
                for (int l = 0; l < ft.m; ++l)
                  acc += raw.at(i, j, k, l) * e[2 * a + i] *
                         std::conj(e[2 * b + j]) * e[2 * c + k] *
                         std::conj(e[2 * d + l]);
          ft.at(a, b, c, d) = acc;
        }
  sample.frame_tensor = ft;
  double s = 0;
  for (int i = 0; i < ft.m; ++i)
    for (int k = 0; k < ft.m; ++k) s += ft.at(i, i, k, k).real();
  sample.scalar_s = s;
  sample.obc_min = min_over_frame(raw, e);
  return sample;
}

ObcResult obc_check(const MetricModel& metric, std::span<const ChartPoint> points,
                    int frames_per_point, std::uint64_t seed) {
  if (frames_per_point < 1)
    throw Error(ErrorKind::DomainError, "frames-per-point must be >= 1");
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    CurvTensor raw = metric.curvature_components(points[pi]);
    auto e = orthonormal_frame(metric.metric_at(points[pi]), metric.m());
    lo = std::min(lo, min_over_frame(raw, e));
    if (metric.m() == 2) {
      // fixed 2-plane rotations of the coordinate frame
      for (double th : {0.39269908169872414, 0.7853981633974483,
                        1.1780972450961724})
        for (int ph = 0; ph < 2; ++ph) {
          Cplx w = ph == 0 ? Cplx(1, 0) : Cplx(0, 1);
          std::array<Cplx, 4> u{std::cos(th), -w * std::sin(th),
                                std::conj(w) * std::sin(th), std::cos(th)};
          lo = std::min(lo, min_over_frame(raw, apply_unitary(e, u)));
        }
      Rng rng(Rng::derive(seed, pi));
      for (int fp = 0; fp < frames_per_point; ++fp)
        lo = std::min(lo, min_over_frame(raw, apply_unitary(e, haar_unitary2(rng))));
    }
  }
  return {lo >= -1e-9, lo};
}

std::vector<ChartPoint> default_sample_points(const MetricModel& metric,
                                              int count, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 0xC0DE));
  std::vector<ChartPoint> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    ChartPoint z{Cplx(0, 0), Cplx(0, 0)};
    if (metric.kind() == MetricModel::Kind::PoincareDisk) {
      double r = 0.9 * std::sqrt(rng.uniform());
      double a = rng.uniform(0, 2 * 3.14159265358979323846);
      z[0] = Cplx(r * std::cos(a), r * std::sin(a));
    } else {
      for (int c = 0; c < metric.m(); ++c)
        z[c] = Cplx(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    }
    pts.push_back(z);
  }
  return pts;
}

}  // namespace cma
