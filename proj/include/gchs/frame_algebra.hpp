#pragma once

#include <span>
#include <vector>

#include "gchs/manifold.hpp"
#include "gchs/poisson_w.hpp"

namespace gchs {

/// Structure functions of the frame at a point: [E_i,E_j] = c_ij^k E_k.
struct StructureFunctions {
  int n = 0;
  std::vector<double> c;  // c[(i*n + j)*n + k] = c_ij^k
  double condition = 1.0;

  double operator()(int i, int j, int k) const { return c[(static_cast<std::size_t>(i) * n + j) * n + k]; }
  double& operator()(int i, int j, int k) { return c[(static_cast<std::size_t>(i) * n + j) * n + k]; }
};

/// Solves e(x)^T c_ij = [E_i,E_j](x) for each i<j. Throws FrameError on ill-conditioned frames.
StructureFunctions structure_functions(const PoissonWManifold& M, std::span<const double> x);

/// max over (i,j,k,s) of |c_ij^r c_rk^s + c_jk^r c_ri^s + c_ki^r c_rj^s|.
double structure_jacobi_residual(const StructureFunctions& c);
double structure_jacobi_residual(const PoissonWManifold& M, std::span<const double> x);

/// max over (i,j,k) of |c_ij^k + c_ji^k|.
double structure_antisymmetry_residual(const StructureFunctions& c);

/// Entry (j,k) = D_j V_k for a field returning n components, at carrier level T.
template <class T, class V>
Matrix<T> covariant_jacobian(const LocalGeometry<T>& geom, const V& field, std::span<const T> x) {
  std::vector<T> values;
  std::vector<std::vector<T>> jac;  // jac[k][a] = d_a V_k
  jacobian(field, x, values, jac);
  const int n = geom.n;
  const int m = static_cast<int>(values.size());
  Matrix<T> out(n, T(0.0));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < m && k < n; ++k) {
      T acc = geom.A[j] * values[k];
      for (int a = 0; a < n; ++a) acc += geom.e(j, a) * jac[k][a];
      out(j, k) = acc;
    }
  return out;
}

template <class V>
Matrix<double> covariant_derivative_of(const PoissonWManifold& M, const V& field, std::span<const double> x) {
  return covariant_jacobian(M.at(x), field, x);
}

/// All-index commutator [D_i,D_j] g computed from nested jets: entry (i,j).
template <class G>
Matrix<double> covariant_commutator(const PoissonWManifold& M, const G& g, std::span<const double> x) {
  auto Dg = [&]<class U>(std::span<const U> y) { return covariant_D(M.at(y), g, y); };
  const Matrix<double> DD = covariant_derivative_of(M, Dg, x);  // D_i (D_j g)
  const int n = M.dim();
  Matrix<double> out(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = DD(i, j) - DD(j, i);
  return out;
}

/// c_ij^k D_k g, entry (i,j).
template <class G>
Matrix<double> structural_commutator(const PoissonWManifold& M, const StructureFunctions& c, const G& g,
                                     std::span<const double> x) {
  const auto Dg = covariant_D(M.at(x), g, x);
  const int n = M.dim();
  Matrix<double> out(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += c(i, j, k) * Dg[k];
      out(i, j) = acc;
    }
  return out;
}

/// [D_i,D_j] g two ways: literal commutator and c_ij^k D_k g.
Pair<double> curvature_apply(const PoissonWManifold& M, int i, int j, const ScalarExpr& g, std::span<const double> x);

/// w_i^k = v^j c_ij^k.
std::vector<double> curvature_velocity_coefficients(const StructureFunctions& c, std::span<const double> v, int i);

/// q_i g = w_i^k D_k g.
double curvature_velocity(const PoissonWManifold& M, std::span<const double> v, int i, const ScalarExpr& g, std::span<const double> x);
/// sum_j v^j [D_i,D_j] g from the literal commutator.
double curvature_velocity_literal(const PoissonWManifold& M, std::span<const double> v, int i, const ScalarExpr& g,
                           std::span<const double> x);

/// F_k = -D_k H.
std::vector<double> force(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);

/// u_kj = D_j F_k - D_k F_j by direct differentiation of F.
Matrix<double> u_tensor(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);

/// t_k = -w_k^j F_j.
std::vector<double> t_quantity(const PoissonWManifold& M, std::span<const double> v, const ScalarExpr& H,
                               std::span<const double> x);

/// Residuals of u_kj against +c_kj^i F_i (plus) and -c_kj^i F_i (minus); max over (k,j), normalized.
struct SignedResidual {
  double plus = 0.0;
  double minus = 0.0;
};
SignedResidual force_curl_sign_check(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);

/// (u_ji; t_i) against (F_ij H; q_i H). The u-part is signed; t-part is sign-free.
struct ReciprocalForceResidual {
  SignedResidual u;
  double t = 0.0;
};
ReciprocalForceResidual reciprocal_force_check(const PoissonWManifold& M, std::span<const double> v,
                                               const ScalarExpr& H, std::span<const double> x);

/// |a - b| / (1 + max(|a|, |b|)).
inline double normalized_residual(double a, double b) {
  return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace gchs
