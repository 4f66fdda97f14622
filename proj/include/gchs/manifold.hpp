#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gchs/jet.hpp"
#include "gchs/scalar_expr.hpp"

namespace gchs {

/// Dense row-major square matrix.
template <class T>
struct Matrix {
  int n = 0;
  std::vector<T> data;

  Matrix() = default;
  explicit Matrix(int size, const T& fill = T{}) : n(size), data(static_cast<std::size_t>(size) * size, fill) {}

  T& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * n + j]; }
  const T& operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
};

inline constexpr double kAntisymmetryTol = 1e-12;
inline constexpr double kMaxFrameCondition = 1e8;

/// Geometry of a Poisson-W manifold evaluated at one point, at carrier level T.
template <class T>
struct LocalGeometry {
  int n = 0;
  Matrix<T> J;
  Matrix<T> frame;  // rows E_i; empty when the coordinate frame is used
  std::vector<T> A;
  T chi{};

  bool coordinate_frame() const { return frame.n == 0; }
  /// e_i^a, defaulting to the identity.
  T e(int i, int a) const {
    if (coordinate_frame()) return T(i == a ? 1.0 : 0.0);
    return frame(i, a);
  }
  /// E_i applied to a function with coordinate gradient `grad`.
  std::vector<T> directional(const std::vector<T>& grad) const {
    if (coordinate_frame()) return grad;
    std::vector<T> out(n, T(0.0));
    for (int i = 0; i < n; ++i) {
      T acc(0.0);
      for (int a = 0; a < n; ++a) acc += frame(i, a) * grad[a];
      out[i] = acc;
    }
    return out;
  }
};

/**
 * Open box of R^n carrying an antisymmetric structure matrix J(x), a structure
 * function chi and an optional frame E_i = e_i^a d_a. The structural derivative
 * is A_i = E_i chi unless an explicit override is installed (used only to
 * inject faults in negative tests).
 */
class PoissonWManifold {
 public:
  PoissonWManifold(int n, Matrix<ScalarExpr> J, ScalarExpr chi, std::optional<Matrix<ScalarExpr>> frame = {});

  /// J = [[0, I], [-I, 0]] on R^{2m}.
  static PoissonWManifold canonical(int m, ScalarExpr chi, std::optional<Matrix<ScalarExpr>> frame = {});

  int dim() const { return n_; }
  const Matrix<ScalarExpr>& J() const { return J_; }
  const ScalarExpr& chi() const { return chi_; }
  const std::optional<Matrix<ScalarExpr>>& frame() const { return frame_; }
  bool has_frame() const { return frame_.has_value(); }
  bool canonical_structure() const { return canonical_; }
  bool phase_split() const { return n_ % 2 == 0; }

  void set_structural_override(std::vector<ScalarExpr> A);
  bool has_structural_override() const { return !A_override_.empty(); }

  /// 2-norm condition number of the frame matrix at x; 1 without a frame.
  double frame_condition(std::span<const double> x) const;
  /// Throws FrameError when the frame is singular or cond > kMaxFrameCondition.
  void require_valid_frame(std::span<const double> x) const;

  /// Checks |J_ij + J_ji| <= tol at the given points; throws StructureError naming the entry.
  void validate_antisymmetry(std::span<const std::vector<double>> points) const;

  template <class T>
  LocalGeometry<T> at(std::span<const T> x) const;

 private:
  int n_;
  Matrix<ScalarExpr> J_;
  ScalarExpr chi_;
  std::optional<Matrix<ScalarExpr>> frame_;
  std::vector<ScalarExpr> A_override_;
  bool canonical_ = false;
};

template <class T>
LocalGeometry<T> PoissonWManifold::at(std::span<const T> x) const {
  if (static_cast<int>(x.size()) != n_) throw StructureError("point dimension does not match manifold");
  LocalGeometry<T> g;
  g.n = n_;
  g.J = Matrix<T>(n_, T(0.0));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g.J(i, j) = J_(i, j)(x);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (std::abs(primal(g.J(i, j)) + primal(g.J(j, i))) > kAntisymmetryTol)
        throw StructureError("structure matrix not antisymmetric: J" + std::to_string(i + 1) +
                             std::to_string(j + 1) + " != -J" + std::to_string(j + 1) + std::to_string(i + 1));
  if (frame_) {
    g.frame = Matrix<T>(n_, T(0.0));
    for (int i = 0; i < n_; ++i)
      for (int a = 0; a < n_; ++a) g.frame(i, a) = (*frame_)(i, a)(x);
  }
  if (A_override_.empty()) {
    auto grad = gradient(chi_, x, &g.chi);
    g.A = g.directional(grad);
  } else {
    g.chi = chi_(x);
    g.A.resize(n_);
    for (int i = 0; i < n_; ++i) g.A[i] = A_override_[i](x);
  }
  return g;
}

/// Phase-space reading of p_k: x_{m+k} for k < m, x_k otherwise (n = 2m).
template <class T>
T momentum_value(std::span<const T> x, int k) {
  const int m = static_cast<int>(x.size()) / 2;
  return k < m ? x[m + k] : x[k];
}

}  // namespace gchs
