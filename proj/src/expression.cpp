#include "cma/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

namespace cma {

namespace {

enum class Op {
  Const, Var,            // leaf
  Add, Sub, Mul, Div, Pow, Neg,
  Sin, Cos, Exp, Sqrt, Abs, Log,
  Max, Min
};

enum class Var { X1, Y1, X2, Y2, S, Pi };

}  // namespace

struct Expression::Node {
  Op op;
  double value = 0;
  Var var = Var::S;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    auto e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw Error(ErrorKind::ParseError, "expression error at offset " +
                                           std::to_string(pos_) + ": " + why +
                                           " in \"" + s_ + "\"");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (eat('+')) lhs = make(Op::Add, lhs, term());
      else if (eat('-')) lhs = make(Op::Sub, lhs, term());
      else return lhs;
    }
  }
  NodePtr term() {
    auto lhs = factor();
    for (;;) {
      if (eat('*')) lhs = make(Op::Mul, lhs, factor());
      else if (eat('/')) lhs = make(Op::Div, lhs, factor());
      else return lhs;
    }
  }
  NodePtr factor() {
    auto base = unary();
    if (eat('^')) return make(Op::Pow, base, factor());  // right-assoc
    return base;
  }
  NodePtr unary() {
    if (eat('-')) return make(Op::Neg, unary());
    if (eat('+')) return unary();
    return primary();
  }
  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Const;
      n->value = v;
      return n;
    }
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (peek() == '(') return call(name);
      return variable(name);
    }
    fail("unexpected character");
  }

  NodePtr variable(const std::string& name) {
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Var;
    if (name == "x1") n->var = Var::X1;
    else if (name == "y1") n->var = Var::Y1;
    else if (name == "x2") n->var = Var::X2;
    else if (name == "y2") n->var = Var::Y2;
    else if (name == "s") n->var = Var::S;
    else if (name == "pi") n->var = Var::Pi;
    else fail("unknown identifier '" + name + "'");
    return n;
  }

  NodePtr call(const std::string& name) {
    if (!eat('(')) fail("expected '('");
    auto a = expr();
    NodePtr b;
    bool binary = name == "max" || name == "min" || name == "pow";
    if (binary) {
      if (!eat(',')) fail("'" + name + "' takes two arguments");
      b = expr();
    }
    if (!eat(')')) fail("expected ')'");
    if (name == "sin") return make(Op::Sin, a);
    if (name == "cos") return make(Op::Cos, a);
    if (name == "exp") return make(Op::Exp, a);
    if (name == "sqrt") return make(Op::Sqrt, a);
    if (name == "abs") return make(Op::Abs, a);
    if (name == "log") return make(Op::Log, a);
    if (name == "max") return make(Op::Max, a, b);
    if (name == "min") return make(Op::Min, a, b);
    if (name == "pow") return make(Op::Pow, a, b);
    fail("unknown function '" + name + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expression::Node& n, const std::array<double, 4>& xy,
                 int m) {
  auto A = [&] { return eval_node(*n.a, xy, m); };
  auto B = [&] { return eval_node(*n.b, xy, m); };
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:
      switch (n.var) {
        case Var::X1: return xy[0];
        case Var::Y1: return xy[1];
        case Var::X2: return xy[2];
        case Var::Y2: return xy[3];
        case Var::Pi: return 3.14159265358979323846;
        case Var::S: {
          double s = xy[0] * xy[0] + xy[1] * xy[1];
          if (m == 2) s += xy[2] * xy[2] + xy[3] * xy[3];
          return s;
        }
      }
      return 0;
    case Op::Add: return A() + B();
    case Op::Sub: return A() - B();
    case Op::Mul: return A() * B();
    case Op::Div: return A() / B();
    case Op::Pow: return std::pow(A(), B());
    case Op::Neg: return -A();
    case Op::Sin: return std::sin(A());
    case Op::Cos: return std::cos(A());
    case Op::Exp: return std::exp(A());
    case Op::Sqrt: return std::sqrt(A());
    case Op::Abs: return std::abs(A());
    case Op::Log: return std::log(A());
    case Op::Max: return std::max(A(), B());
    case Op::Min: return std::min(A(), B());
  }
  return 0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).run();
  e.text_ = text;
  return e;
}

double Expression::eval(const std::array<double, 4>& xy, int m) const {
  if (!root_) throw Error(ErrorKind::ParseError, "empty expression");
  return eval_node(*root_, xy, m);
}

ScalarField sample_expression(DomainPtr dom, const Expression& expr,
                              bool clamp_exterior_at_zero) {
  ScalarField f(dom);
  const int m = dom->m();
  for (std::size_t nd = 0; nd < dom->lattice_size(); ++nd) {
    double v = expr.eval(dom->position(nd), m);
    if (clamp_exterior_at_zero && dom->node_class(nd) == NodeClass::Exterior)
      v = std::max(v, 0.0);
    f[nd] = v;
  }
  return f;
}

ScalarField sample_function(DomainPtr dom,
                            const std::function<double(std::array<double, 4>)>& fn,
                            bool everywhere) {
  ScalarField f(dom);
  for (std::size_t nd = 0; nd < dom->lattice_size(); ++nd) {
    if (!everywhere && dom->node_class(nd) == NodeClass::Exterior) continue;
    f[nd] = fn(dom->position(nd));
  }
  return f;
}

}  // namespace cma
