#pragma once

#include <span>
#include <vector>

#include "gchs/dual.hpp"
#include "gchs/scalar_expr.hpp"

namespace gchs {

/// Value and dense derivatives of a scalar at a point.
struct Jet {
  int order = 0;
  double value = 0.0;
  std::vector<double> first;   // n
  std::vector<double> second;  // n*n row-major, order >= 2
  std::vector<double> third;   // n*n*n, order == 3

  double grad(int a) const { return first[a]; }
  double hess(int a, int b) const { return second[a * dim() + b]; }
  double d3(int a, int b, int c) const { return third[(a * dim() + b) * dim() + c]; }
  int dim() const { return static_cast<int>(first.size()); }
};

/// Forward-mode jet of order 1, 2 or 3 (nested dual carriers).
Jet eval_jet(const ScalarExpr& f, std::span<const double> x, int order);

/// Gradient of any scalar field at carrier level T, computed at Dual<T>.
template <class T, class F>
std::vector<T> gradient(const F& f, std::span<const T> x, T* value = nullptr) {
  auto y = seed(x);
  Dual<T> r = f(std::span<const Dual<T>>(y));
  if (value) *value = r.v;
  std::vector<T> g(x.size(), T(0.0));
  for (int a = 0; a < r.n && a < static_cast<int>(x.size()); ++a) g[a] = r.d[a];
  return g;
}

/// Values and Jacobian (rows = outputs) of a vector-valued field returning std::vector<Dual<T>>.
template <class T, class V>
void jacobian(const V& field, std::span<const T> x, std::vector<T>& values, std::vector<std::vector<T>>& jac) {
  auto y = seed(x);
  std::vector<Dual<T>> r = field(std::span<const Dual<T>>(y));
  values.assign(r.size(), T(0.0));
  jac.assign(r.size(), std::vector<T>(x.size(), T(0.0)));
  for (std::size_t b = 0; b < r.size(); ++b) {
    values[b] = r[b].v;
    for (int a = 0; a < r[b].n && a < static_cast<int>(x.size()); ++a) jac[b][a] = r[b].d[a];
  }
}

}  // namespace gchs
