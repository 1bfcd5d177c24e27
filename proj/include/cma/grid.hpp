#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cma/errors.hpp"

namespace cma {

enum class NodeClass : std::uint8_t { Interior = 0, Band = 1, Exterior = 2 };

enum class Shape { Ball, Box, Torus };

/// Uniform lattice over R^{2m} (m = 1 or 2) carrying the node classification
/// interior / boundary-band / exterior for ball, box and torus shapes.
///
/// Ball and box lattices may carry `pad` extra node layers beyond the
/// bounding box (classified exterior); mollification kernels read them.
/// One spacing h serves every real axis.
class GridDomain {
 public:
  static GridDomain ball(int m, int n, double radius,
                         std::array<double, 4> center = {0, 0, 0, 0},
                         int pad = 0);
  static GridDomain box(int m, int n, double extent, int pad = 0);
  static GridDomain torus(int m, int n, double period = 1.0);

  int m() const { return m_; }
  int dims() const { return 2 * m_; }
  int nodes_per_axis() const { return n_; }
  int lattice_per_axis() const { return axis_len_; }
  int pad() const { return pad_; }
  double spacing() const { return h_; }
  Shape shape() const { return shape_; }
  bool periodic() const { return shape_ == Shape::Torus; }
  double radius() const { return radius_; }
  double extent() const { return extent_; }
  double period() const { return period_; }
  const std::array<double, 4>& center() const { return center_; }

  std::size_t lattice_size() const { return lattice_size_; }

  std::size_t flatten(std::span<const int> idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dims(); ++a) f = f * axis_len_ + idx[a];
    return f;
  }
  std::array<int, 4> unflatten(std::size_t node) const {
    std::array<int, 4> idx{0, 0, 0, 0};
    for (int a = dims() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(node % axis_len_);
      node /= axis_len_;
    }
    return idx;
  }

  /// Steps along real axes; wraps on the torus, returns npos off-lattice.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t offset_node(std::size_t node, std::span<const int> delta) const;

  double coord(std::size_t node, int axis) const {
    int i = static_cast<int>((node / stride_[axis]) % axis_len_);
    return origin_[axis] + i * h_;
  }
  std::array<double, 4> position(std::size_t node) const {
    std::array<double, 4> x{0, 0, 0, 0};
    for (int a = 0; a < dims(); ++a) x[a] = coord(node, a);
    return x;
  }
  double dist_to_center(std::size_t node) const;

  NodeClass node_class(std::size_t node) const { return cls_[node]; }
  bool is_interior(std::size_t node) const {
    return cls_[node] == NodeClass::Interior;
  }
  /// Interior node whose full Chebyshev-1 stencil neighborhood is interior.
  bool is_deep_interior(std::size_t node) const { return deep_[node] != 0; }

  const std::vector<std::size_t>& interior_nodes() const { return interior_; }
  const std::vector<std::size_t>& band_nodes() const { return band_; }
  const std::vector<std::size_t>& deep_interior_nodes() const { return deep_list_; }

  bool same_layout(const GridDomain& other) const;

 private:
  GridDomain() = default;
  void classify();

  Shape shape_ = Shape::Box;
  int m_ = 1;
  int n_ = 0;
  int pad_ = 0;
  int axis_len_ = 0;
  double h_ = 0;
  double radius_ = 0;
  double extent_ = 0;
  double period_ = 0;
  std::array<double, 4> center_{0, 0, 0, 0};
  std::array<double, 4> origin_{0, 0, 0, 0};
  std::array<std::size_t, 4> stride_{0, 0, 0, 0};
  std::size_t lattice_size_ = 0;
  std::vector<NodeClass> cls_;
  std::vector<std::uint8_t> deep_;
  std::vector<std::size_t> interior_, band_, deep_list_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Real-valued grid function. Values live at non-exterior nodes unless the
/// producer filled more (expression sampling fills the whole lattice, padding
/// included); unset nodes hold NaN.
struct ScalarField {
  DomainPtr domain;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(DomainPtr dom);

  double operator[](std::size_t node) const { return values[node]; }
  double& operator[](std::size_t node) { return values[node]; }

  bool defined_at(std::size_t node) const;
};

/// Sum with a fixed pairwise tree order: the result does not depend on any
/// parallel schedule and carries O(log n) rounding.
double pairwise_sum(std::span<const double> xs);

}  // namespace cma
