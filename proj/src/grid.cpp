#include "cma/grid.hpp"

#include <cmath>
#include <limits>

namespace cma {

namespace {

void check_mn(int m, int n) {
  if (m != 1 && m != 2)
    throw Error(ErrorKind::DomainError, "complex dimension m must be 1 or 2");
  if (n < 5)
    throw Error(ErrorKind::DomainError,
                "need n >= 5 nodes per axis (stencils need two neighbors)");
}

}  // namespace

GridDomain GridDomain::ball(int m, int n, double radius,
                            std::array<double, 4> center, int pad) {
  check_mn(m, n);
  if (radius <= 0) throw Error(ErrorKind::DomainError, "ball radius must be > 0");
  GridDomain g;
  g.shape_ = Shape::Ball;
  g.m_ = m;
  g.n_ = n;
  g.pad_ = pad;
  g.radius_ = radius;
  g.center_ = center;
  g.h_ = 2 * radius / (n - 1);
  g.axis_len_ = n + 2 * pad;
  for (int a = 0; a < 2 * m; ++a) g.origin_[a] = center[a] - radius - pad * g.h_;
  g.classify();
  return g;
}

GridDomain GridDomain::box(int m, int n, double extent, int pad) {
  check_mn(m, n);
  if (extent <= 0) throw Error(ErrorKind::DomainError, "box extent must be > 0");
  GridDomain g;
  g.shape_ = Shape::Box;
  g.m_ = m;
  g.n_ = n;
  g.pad_ = pad;
  g.extent_ = extent;
  g.h_ = extent / (n - 1);
  g.axis_len_ = n + 2 * pad;
  for (int a = 0; a < 2 * m; ++a) g.origin_[a] = -extent / 2 - pad * g.h_;
  g.classify();
  return g;
}

GridDomain GridDomain::torus(int m, int n, double period) {
  check_mn(m, n);
  if (period <= 0) throw Error(ErrorKind::DomainError, "torus period must be > 0");
  GridDomain g;
  g.shape_ = Shape::Torus;
  g.m_ = m;
  g.n_ = n;
  g.pad_ = 0;
  g.period_ = period;
  g.h_ = period / n;
  g.axis_len_ = n;
  g.classify();
  return g;
}

void GridDomain::classify() {
  const int d = dims();
  lattice_size_ = 1;
  for (int a = 0; a < d; ++a) lattice_size_ *= axis_len_;
  stride_[d - 1] = 1;
  for (int a = d - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * axis_len_;

  cls_.assign(lattice_size_, NodeClass::Exterior);
  if (shape_ == Shape::Torus) {
    for (auto& c : cls_) c = NodeClass::Interior;
  } else if (shape_ == Shape::Ball) {
    for (std::size_t nd = 0; nd < lattice_size_; ++nd) {
      double dist = dist_to_center(nd);
      if (dist < radius_ - h_)
        cls_[nd] = NodeClass::Interior;
      else if (dist < radius_ + h_)
        cls_[nd] = NodeClass::Band;
    }
  } else {
    // Box: faces are the band, strict inside is interior, padding exterior.
    for (std::size_t nd = 0; nd < lattice_size_; ++nd) {
      auto idx = unflatten(nd);
      bool in_box = true, on_face = false;
      for (int a = 0; a < d; ++a) {
        int i = idx[a] - pad_;
        if (i < 0 || i > n_ - 1) in_box = false;
        else if (i == 0 || i == n_ - 1) on_face = true;
      }
      if (!in_box) continue;
      cls_[nd] = on_face ? NodeClass::Band : NodeClass::Interior;
    }
  }

  interior_.clear();
  band_.clear();
  for (std::size_t nd = 0; nd < lattice_size_; ++nd) {
    if (cls_[nd] == NodeClass::Interior) interior_.push_back(nd);
    else if (cls_[nd] == NodeClass::Band) band_.push_back(nd);
  }

  deep_.assign(lattice_size_, 0);
  deep_list_.clear();
  std::array<int, 4> delta{};
  for (std::size_t nd : interior_) {
    bool deep = true;
    const auto idx = unflatten(nd);
    // Chebyshev-1 neighborhood, at most two nonzero components (stencil reach)
    for (int a = 0; a < d && deep; ++a)
      for (int sa = -1; sa <= 1 && deep; ++sa)
        for (int b = a; b < d && deep; ++b)
          for (int sb = -1; sb <= 1 && deep; ++sb) {
            if (a == b && sb != 0) continue;
            if (sa == 0 && sb == 0) continue;
            delta = {0, 0, 0, 0};
            delta[a] += sa;
            delta[b] += sb;
            std::size_t nb = offset_node(nd, std::span<const int>(delta.data(), d));
            if (nb == npos || cls_[nb] != NodeClass::Interior) deep = false;
          }
    (void)idx;
    if (deep) {
      deep_[nd] = 1;
      deep_list_.push_back(nd);
    }
  }
}

std::size_t GridDomain::offset_node(std::size_t node,
                                    std::span<const int> delta) const {
  const int d = dims();
  std::size_t out = 0;
  for (int a = 0; a < d; ++a) {
    int i = static_cast<int>((node / stride_[a]) % axis_len_) + delta[a];
    if (periodic()) {
      i %= axis_len_;
      if (i < 0) i += axis_len_;
    } else if (i < 0 || i >= axis_len_) {
      return npos;
    }
    out += static_cast<std::size_t>(i) * stride_[a];
  }
  return out;
}

double GridDomain::dist_to_center(std::size_t node) const {
  double s = 0;
  for (int a = 0; a < dims(); ++a) {
    double dx = coord(node, a) - center_[a];
    s += dx * dx;
  }
  return std::sqrt(s);
}

bool GridDomain::same_layout(const GridDomain& other) const {
  return shape_ == other.shape_ && m_ == other.m_ && n_ == other.n_ &&
         pad_ == other.pad_ && h_ == other.h_ && center_ == other.center_ &&
         radius_ == other.radius_ && extent_ == other.extent_ &&
         period_ == other.period_;
}

ScalarField::ScalarField(DomainPtr dom)
    : domain(std::move(dom)),
      values(domain->lattice_size(),
             std::numeric_limits<double>::quiet_NaN()) {}

bool ScalarField::defined_at(std::size_t node) const {
  return std::isfinite(values[node]);
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 4) {
    double s = 0;
    for (double x : xs) s += x;
    return s;
  }
  std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace cma
