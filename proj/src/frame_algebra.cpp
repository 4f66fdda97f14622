#include "gchs/frame_algebra.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace gchs {

StructureFunctions structure_functions(const PoissonWManifold& M, std::span<const double> x) {
  const int n = M.dim();
  StructureFunctions sf;
  sf.n = n;
  sf.c.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  if (!M.has_frame()) return sf;

  sf.condition = M.frame_condition(x);
  if (!(sf.condition <= kMaxFrameCondition))
    throw FrameError("frame ill-conditioned at point (cond = " + std::to_string(sf.condition) + ")");

  const auto& frame = *M.frame();
  auto entries = [&]<class U>(std::span<const U> y) {
    std::vector<U> out;
    out.reserve(frame.data.size());
    for (const auto& e : frame.data) out.push_back(e(y));
    return out;
  };
  std::vector<double> e;
  std::vector<std::vector<double>> de;  // de[i*n+b][a] = d_a e_i^b
  jacobian(entries, x, e, de);

  Eigen::MatrixXd et(n, n);  // et(b,k) = e_k^b
  for (int k = 0; k < n; ++k)
    for (int b = 0; b < n; ++b) et(b, k) = e[k * n + b];
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(et);

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd comm(n);
      for (int b = 0; b < n; ++b) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) acc += e[i * n + a] * de[j * n + b][a] - e[j * n + a] * de[i * n + b][a];
        comm(b) = acc;
      }
      const Eigen::VectorXd cij = lu.solve(comm);
      for (int k = 0; k < n; ++k) {
        sf(i, j, k) = cij(k);
        sf(j, i, k) = -cij(k);
      }
    }
  return sf;
}

double structure_jacobi_residual(const StructureFunctions& c) {
  const int n = c.n;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int s = 0; s < n; ++s) {
          double acc = 0.0;
          for (int r = 0; r < n; ++r)
            acc += c(i, j, r) * c(r, k, s) + c(j, k, r) * c(r, i, s) + c(k, i, r) * c(r, j, s);
          worst = std::max(worst, std::abs(acc));
        }
  return worst;
}

double structure_jacobi_residual(const PoissonWManifold& M, std::span<const double> x) {
  return structure_jacobi_residual(structure_functions(M, x));
}

double structure_antisymmetry_residual(const StructureFunctions& c) {
  double worst = 0.0;
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j)
      for (int k = 0; k < c.n; ++k) worst = std::max(worst, std::abs(c(i, j, k) + c(j, i, k)));
  return worst;
}

Pair<double> curvature_apply(const PoissonWManifold& M, int i, int j, const ScalarExpr& g,
                             std::span<const double> x) {
  const auto sf = structure_functions(M, x);
  return {covariant_commutator(M, g, x)(i, j), structural_commutator(M, sf, g, x)(i, j)};
}

std::vector<double> curvature_velocity_coefficients(const StructureFunctions& c, std::span<const double> v, int i) {
  std::vector<double> w(c.n, 0.0);
  for (int k = 0; k < c.n; ++k)
    for (int j = 0; j < c.n; ++j) w[k] += v[j] * c(i, j, k);
  return w;
}

double curvature_velocity(const PoissonWManifold& M, std::span<const double> v, int i, const ScalarExpr& g,
           std::span<const double> x) {
  const auto sf = structure_functions(M, x);
  const auto w = curvature_velocity_coefficients(sf, v, i);
  const auto Dg = covariant_D(M.at(x), g, x);
  double acc = 0.0;
  for (int k = 0; k < M.dim(); ++k) acc += w[k] * Dg[k];
  return acc;
}

double curvature_velocity_literal(const PoissonWManifold& M, std::span<const double> v, int i, const ScalarExpr& g,
                           std::span<const double> x) {
  M.require_valid_frame(x);
  const auto comm = covariant_commutator(M, g, x);
  double acc = 0.0;
  for (int j = 0; j < M.dim(); ++j) acc += v[j] * comm(i, j);
  return acc;
}

std::vector<double> force(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  M.require_valid_frame(x);
  auto F = covariant_D(M.at(x), H, x);
  for (auto& Fk : F) Fk = -Fk;
  return F;
}

Matrix<double> u_tensor(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  M.require_valid_frame(x);
  auto F = [&]<class U>(std::span<const U> y) {
    auto D = covariant_D(M.at(y), H, y);
    for (auto& d : D) d = -d;
    return D;
  };
  const auto DF = covariant_derivative_of(M, F, x);  // (j,k) = D_j F_k
  const int n = M.dim();
  Matrix<double> u(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) u(k, j) = DF(j, k) - DF(k, j);
  return u;
}

std::vector<double> t_quantity(const PoissonWManifold& M, std::span<const double> v, const ScalarExpr& H,
                               std::span<const double> x) {
  const auto sf = structure_functions(M, x);
  const auto F = force(M, H, x);
  std::vector<double> t(M.dim(), 0.0);
  for (int k = 0; k < M.dim(); ++k) {
    const auto w = curvature_velocity_coefficients(sf, v, k);
    for (int j = 0; j < M.dim(); ++j) t[k] -= w[j] * F[j];
  }
  return t;
}

SignedResidual force_curl_sign_check(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  const auto sf = structure_functions(M, x);
  const auto F = force(M, H, x);
  const auto u = u_tensor(M, H, x);
  const int n = M.dim();
  SignedResidual r;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double cF = 0.0;
      for (int i = 0; i < n; ++i) cF += sf(k, j, i) * F[i];
      r.plus = std::max(r.plus, normalized_residual(u(k, j), cF));
      r.minus = std::max(r.minus, normalized_residual(u(k, j), -cF));
    }
  return r;
}

ReciprocalForceResidual reciprocal_force_check(const PoissonWManifold& M, std::span<const double> v,
                                               const ScalarExpr& H, std::span<const double> x) {
  const auto sf = structure_functions(M, x);
  const auto u = u_tensor(M, H, x);
  const auto FH = covariant_commutator(M, H, x);
  const auto t = t_quantity(M, v, H, x);
  const auto DH = covariant_D(M.at(x), H, x);
  const int n = M.dim();
  ReciprocalForceResidual r;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      r.u.plus = std::max(r.u.plus, normalized_residual(u(j, i), FH(i, j)));
      r.u.minus = std::max(r.u.minus, normalized_residual(u(j, i), -FH(i, j)));
    }
    const auto w = curvature_velocity_coefficients(sf, v, i);
    double qH = 0.0;
    for (int k = 0; k < n; ++k) qH += w[k] * DH[k];
    r.t = std::max(r.t, normalized_residual(t[i], qH));
  }
  return r;
}

}  // namespace gchs
