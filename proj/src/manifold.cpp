#include "gchs/manifold.hpp"

#include <Eigen/Dense>
#include <limits>

namespace gchs {

PoissonWManifold::PoissonWManifold(int n, Matrix<ScalarExpr> J, ScalarExpr chi,
                                   std::optional<Matrix<ScalarExpr>> frame)
    : n_(n), J_(std::move(J)), chi_(std::move(chi)), frame_(std::move(frame)) {
  if (n_ < 1 || n_ > kMaxDim) throw StructureError("dimension must be in 1.." + std::to_string(kMaxDim));
  if (J_.n != n_) throw StructureError("structure matrix size does not match dimension");
  if (chi_.dim() != n_) throw StructureError("structure function dimension mismatch");
  if (frame_ && frame_->n != n_) throw StructureError("frame size does not match dimension");
  for (const auto& entry : J_.data)
    if (entry.dim() != n_) throw StructureError("structure matrix entry dimension mismatch");
  if (frame_)
    for (const auto& entry : frame_->data)
      if (entry.dim() != n_) throw StructureError("frame entry dimension mismatch");
}

PoissonWManifold PoissonWManifold::canonical(int m, ScalarExpr chi, std::optional<Matrix<ScalarExpr>> frame) {
  const int n = 2 * m;
  Matrix<ScalarExpr> J(n, ScalarExpr::constant(0.0, n));
  for (int i = 0; i < m; ++i) {
    J(i, m + i) = ScalarExpr::constant(1.0, n);
    J(m + i, i) = ScalarExpr::constant(-1.0, n);
  }
  PoissonWManifold M(n, std::move(J), std::move(chi), std::move(frame));
  M.canonical_ = true;
  return M;
}

void PoissonWManifold::set_structural_override(std::vector<ScalarExpr> A) {
  if (static_cast<int>(A.size()) != n_) throw StructureError("structural derivative override needs n entries");
  A_override_ = std::move(A);
}

double PoissonWManifold::frame_condition(std::span<const double> x) const {
  if (!frame_) return 1.0;
  Eigen::MatrixXd e(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int a = 0; a < n_; ++a) e(i, a) = (*frame_)(i, a)(x);
  // 2-norm condition from singular values; LU's rcond estimate misses exact singularity
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

void PoissonWManifold::require_valid_frame(std::span<const double> x) const {
  const double cond = frame_condition(x);
  if (!(cond <= kMaxFrameCondition))
    throw FrameError("frame ill-conditioned at point (cond = " + std::to_string(cond) + ")");
}

void PoissonWManifold::validate_antisymmetry(std::span<const std::vector<double>> points) const {
  for (const auto& x : points) {
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        double a = 0.0, b = 0.0;
        try {
          a = J_(i, j)(std::span<const double>(x));
          b = J_(j, i)(std::span<const double>(x));
        } catch (const NumericDomainError&) {
          continue;
        }
        if (std::abs(a + b) > kAntisymmetryTol)
          throw StructureError("structure matrix not antisymmetric: J" + std::to_string(i + 1) +
                               std::to_string(j + 1) + " != -J" + std::to_string(j + 1) + std::to_string(i + 1));
      }
  }
}

}  // namespace gchs
