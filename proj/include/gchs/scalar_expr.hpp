#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gchs/dual.hpp"
#include "gchs/errors.hpp"

namespace gchs {

/**
 * Immutable expression tree for a smooth scalar field on R^n.
 *
 * Nodes live in a shared flat array (children before parents, root last), so
 * copies are cheap and concurrent evaluation needs no synchronization. The
 * evaluator is a template over the numeric carrier: double for values,
 * Dual<double> for gradients, nested duals for higher derivatives.
 */
class ScalarExpr {
 public:
  enum class Op : std::uint8_t {
    Const,
    Var,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
    Add,
    Sub,
    Mul,
    Div,
    Pow
  };

  struct Node {
    Op op = Op::Const;
    int lhs = -1;  // operand of unary ops, left operand of binary ops
    int rhs = -1;
    int var = -1;
    double value = 0.0;
  };

  ScalarExpr() = default;
  ScalarExpr(std::vector<Node> nodes, int dim);

  static ScalarExpr constant(double value, int dim);
  static ScalarExpr variable(int index, int dim);

  int dim() const { return dim_; }
  bool empty() const { return !nodes_ || nodes_->empty(); }
  const std::vector<Node>& nodes() const { return *nodes_; }

  /// True when no variable appears in the tree.
  bool is_constant() const;

  template <class T>
  T operator()(std::span<const T> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw StructureError("point has " + std::to_string(x.size()) + " coordinates, field expects " +
                           std::to_string(dim_));
    T r = eval_node<T>(static_cast<int>(nodes_->size()) - 1, x);
    if (!all_finite(r)) throw NumericDomainError("non-finite result");
    return r;
  }

  double eval(std::span<const double> x) const { return (*this)(x); }

  /// Fully parenthesized text that parse() maps back to an equivalent tree.
  std::string to_string(std::span<const std::string> names = {}) const;

 private:
  template <class T>
  T eval_node(int idx, std::span<const T> x) const;

  std::shared_ptr<const std::vector<Node>> nodes_;
  int dim_ = 0;
};

/// Callable evaluating a scalar field for every carrier type used in this library.
template <class F>
concept ScalarField = requires(const F& f, std::span<const double> x, std::span<const Dual<double>> y,
                               std::span<const Dual<Dual<double>>> z) {
  { f(x) } -> std::convertible_to<double>;
  { f(y) } -> std::convertible_to<Dual<double>>;
  { f(z) } -> std::convertible_to<Dual<Dual<double>>>;
};

/**
 * Parse an expression over n variables.
 *
 * Grammar: + - (left assoc) < * / (left assoc) < unary minus < ^ (right assoc).
 * Functions sin cos exp log sqrt tanh take one argument; constants pi and e.
 * Variables are x1..xn, plus q1..qm, p1..pm when n = 2m, plus any names given.
 */
ScalarExpr parse(std::string_view text, int n, std::span<const std::string> names = {});

/// Default variable names: q1..qm,p1..pm when n = 2m is even, x1..xn otherwise.
std::vector<std::string> default_names(int n);

template <class T>
T ScalarExpr::eval_node(int idx, std::span<const T> x) const {
  const Node& node = (*nodes_)[idx];
  switch (node.op) {
    case Op::Const:
      return T(node.value);
    case Op::Var:
      return x[node.var];
    case Op::Neg:
      return -eval_node<T>(node.lhs, x);
    case Op::Sin:
      return sin(eval_node<T>(node.lhs, x));
    case Op::Cos:
      return cos(eval_node<T>(node.lhs, x));
    case Op::Exp:
      return exp(eval_node<T>(node.lhs, x));
    case Op::Tanh:
      return tanh(eval_node<T>(node.lhs, x));
    case Op::Log: {
      T a = eval_node<T>(node.lhs, x);
      if (!(primal(a) > 0.0)) throw NumericDomainError("log of non-positive value");
      return log(a);
    }
    case Op::Sqrt: {
      T a = eval_node<T>(node.lhs, x);
      const double a0 = primal(a);
      if (a0 < 0.0) throw NumericDomainError("sqrt of negative value");
      if (a0 == 0.0 && is_dual<T>::value) throw NumericDomainError("sqrt not differentiable at 0");
      return sqrt(a);
    }
    case Op::Add:
      return eval_node<T>(node.lhs, x) + eval_node<T>(node.rhs, x);
    case Op::Sub:
      return eval_node<T>(node.lhs, x) - eval_node<T>(node.rhs, x);
    case Op::Mul:
      return eval_node<T>(node.lhs, x) * eval_node<T>(node.rhs, x);
    case Op::Div: {
      T den = eval_node<T>(node.rhs, x);
      if (primal(den) == 0.0) throw NumericDomainError("division by zero");
      return eval_node<T>(node.lhs, x) / den;
    }
    case Op::Pow: {
      const Node& ex = (*nodes_)[node.rhs];
      T base = eval_node<T>(node.lhs, x);
      if (ex.op == Op::Const && ex.value == std::floor(ex.value) && std::fabs(ex.value) < 1e9) {
        const long k = static_cast<long>(ex.value);
        if (k < 0 && primal(base) == 0.0) throw NumericDomainError("zero raised to a negative power");
        return ipow(base, k);
      }
      if (!(primal(base) > 0.0)) throw NumericDomainError("non-integer power of non-positive base");
      return exp(eval_node<T>(node.rhs, x) * log(base));
    }
  }
  return T(0.0);
}

}  // namespace gchs
