#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gchs/audit.hpp"
#include "gchs/manifold.hpp"
#include "gchs/scalar_expr.hpp"

namespace gchs::test {

inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double x0 = x[a];
    x[a] = x0 + h;
    const double fp = f(x);
    x[a] = x0 - h;
    const double fm = f(x);
    x[a] = x0;
    g[a] = (fp - fm) / (2 * h);
  }
  return g;
}

/// Row-major Hessian by central differences of the exact gradient.
inline std::vector<double> fd_hessian(const std::function<std::vector<double>(std::span<const double>)>& grad,
                                      std::vector<double> x, double h = 1e-5) {
  const std::size_t n = x.size();
  std::vector<double> H(n * n);
  for (std::size_t b = 0; b < n; ++b) {
    const double x0 = x[b];
    x[b] = x0 + h;
    const auto gp = grad(x);
    x[b] = x0 - h;
    const auto gm = grad(x);
    x[b] = x0;
    for (std::size_t a = 0; a < n; ++a) H[a * n + b] = (gp[a] - gm[a]) / (2 * h);
  }
  return H;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

inline ScalarExpr ex(const std::string& text, int n) { return parse(text, n); }

inline PoissonWManifold canonical2(const std::string& chi) { return PoissonWManifold::canonical(1, ex(chi, 2)); }

/// R^3 with E1 = d1, E2 = d2, E3 = d3 + x1 d2 and a constant structure matrix.
inline PoissonWManifold heisenberg(const std::string& chi) {
  Matrix<ScalarExpr> J(3, ex("0", 3));
  J(0, 1) = ex("1", 3);
  J(1, 0) = ex("-1", 3);
  J(0, 2) = ex("0.5", 3);
  J(2, 0) = ex("-0.5", 3);
  J(1, 2) = ex("x1", 3);
  J(2, 1) = ex("-x1", 3);
  Matrix<ScalarExpr> E(3, ex("0", 3));
  E(0, 0) = ex("1", 3);
  E(1, 1) = ex("1", 3);
  E(2, 1) = ex("x1", 3);
  E(2, 2) = ex("1", 3);
  return PoissonWManifold(3, std::move(J), ex(chi, 3), std::move(E));
}

/// Random smooth field in n variables mixing polynomial and transcendental terms.
inline std::string random_field_text(SplitMix64& rng, int n) {
  auto var = [&] { return "x" + std::to_string(1 + static_cast<int>(rng.next() % static_cast<unsigned>(n))); };
  auto coef = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", 2.0 * rng.uniform() - 1.0);
    return std::string(buf);
  };
  std::string out;
  const int terms = 2 + static_cast<int>(rng.next() % 3);
  for (int t = 0; t < terms; ++t) {
    std::string term;
    switch (rng.next() % 7) {
      case 0: term = var() + "^" + std::to_string(1 + rng.next() % 3); break;
      case 1: term = var() + "*" + var() + "*" + var(); break;
      case 2: term = "sin(" + coef() + "*" + var() + ")"; break;
      case 3: term = "cos(" + var() + " - " + var() + ")"; break;
      case 4: term = "exp(0.5*" + var() + ")"; break;
      case 5: term = "tanh(" + var() + "*" + var() + ")"; break;
      default: term = "sqrt(2 + " + var() + "^2)"; break;
    }
    out += (t ? " + (" : "(") + coef() + ")*" + term;
  }
  return out;
}

}  // namespace gchs::test
