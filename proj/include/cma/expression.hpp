#pragma once

#include <functional>
#include <memory>
#include <string>

#include "cma/grid.hpp"

namespace cma {

/// Arithmetic over x_i, y_i, s = |z|^2 and pi with sin/cos/exp/sqrt/abs/log,
/// max/min/pow. Enough for every instance in the test suite without an
/// embedded scripting dependency.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double eval(const std::array<double, 4>& xy, int m) const;
  const std::string& text() const { return text_; }

  Expression() = default;

  struct Node;  // exposed for the evaluator

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

/// Samples an expression over the whole lattice, padding included; values
/// beyond the domain come from the same closed form (clamped at 0 so the
/// density powers stay defined).
ScalarField sample_expression(DomainPtr dom, const Expression& expr,
                              bool clamp_exterior_at_zero = true);

ScalarField sample_function(DomainPtr dom,
                            const std::function<double(std::array<double, 4>)>& fn,
                            bool everywhere = false);

}  // namespace cma
