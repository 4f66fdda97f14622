#include "gchs/poisson_w.hpp"

namespace gchs {

double omega_pair(const PoissonWManifold& M, std::span<const double> u, std::span<const double> v) {
  const int n = M.dim();
  if (n % 2 != 0) throw StructureError("symplectic pairing needs an even dimension");
  if (!M.canonical_structure()) throw StructureError("symplectic pairing is defined for the canonical structure only");
  if (static_cast<int>(u.size()) != n || static_cast<int>(v.size()) != n)
    throw StructureError("vector dimension does not match manifold");
  const int m = n / 2;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += u[m + i] * v[i] - u[i] * v[m + i];
  return acc;
}

std::vector<double> structural_derivative(const PoissonWManifold& M, std::span<const double> x) {
  M.require_valid_frame(x);
  return M.at(x).A;
}

std::vector<double> covariant_D(const PoissonWManifold& M, const ScalarExpr& f, std::span<const double> x) {
  M.require_valid_frame(x);
  return covariant_D(M.at(x), f, x);
}

double gpwb(const PoissonWManifold& M, const ScalarExpr& f, const ScalarExpr& g, std::span<const double> x) {
  M.require_valid_frame(x);
  return gpwb(M.at(x), f, g, x);
}

BracketParts<double> gpwb_decomposed(const PoissonWManifold& M, const ScalarExpr& f, const ScalarExpr& g,
                                     std::span<const double> x) {
  M.require_valid_frame(x);
  return gpwb_decomposed(M.at(x), f, g, x);
}

std::vector<double> vec_X(const PoissonWManifold& M, const ScalarExpr& f, std::span<const double> x) {
  M.require_valid_frame(x);
  return vec_X(M.at(x), f, x);
}

std::vector<double> vec_X_chi(const PoissonWManifold& M, std::span<const double> x) {
  M.require_valid_frame(x);
  return vec_X_chi(M.at(x));
}

std::vector<double> vec_XM(const PoissonWManifold& M, const ScalarExpr& f, std::span<const double> x) {
  M.require_valid_frame(x);
  const auto geom = M.at(x);
  auto out = vec_X(geom, f, x);
  const auto xchi = vec_X_chi(geom);
  const double fv = f(x);
  for (std::size_t b = 0; b < out.size(); ++b) out[b] += fv * xchi[b];
  return out;
}

double w_dynamics(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  M.require_valid_frame(x);
  return w_dynamics(M.at(x), H, x);
}

std::vector<double> lie_bracket(const ExprVectorField& V, const ExprVectorField& W, std::span<const double> x) {
  return lie_bracket<double>(V, W, x);
}

}  // namespace gchs
