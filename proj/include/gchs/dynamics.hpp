#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gchs/frame_algebra.hpp"
#include "gchs/manifold.hpp"
#include "gchs/poisson_w.hpp"

namespace gchs {

/**
 * Right-hand side conventions for the covariant flow.
 *   Transport:   x'_i = {H, x_i} - w x_i   (makes Df/dt = {H,f} exact for every f)
 *   DampedLiteral:  x' = J DH - w x
 *   NghsLiteral: x' = J DH
 */
enum class Convention { Transport, DampedLiteral, NghsLiteral };

enum class Method { RK4, RK45 };

std::string to_string(Convention c);
std::string to_string(Method m);
std::optional<Convention> parse_convention(std::string_view text);
std::optional<Method> parse_method(std::string_view text);

/// (J DH)_b = sum_j J_bj D_j H.
template <class T, class Hf>
std::vector<T> nghs_velocity(const LocalGeometry<T>& geom, const Hf& H, std::span<const T> x) {
  const auto DH = covariant_D(geom, H, x);
  std::vector<T> v(geom.n, T(0.0));
  for (int b = 0; b < geom.n; ++b) {
    T acc(0.0);
    for (int j = 0; j < geom.n; ++j) acc += geom.J(b, j) * DH[j];
    v[b] = acc;
  }
  return v;
}

template <class T, class Hf>
std::vector<T> flow_rhs(const LocalGeometry<T>& geom, const Hf& H, Convention convention, std::span<const T> x) {
  switch (convention) {
    case Convention::Transport:
      // {H, x_b} - w x_b reduces to sum_j (sum_i J_ij D_i H) e_j^b.
      return to_coordinates(geom, raise(geom, covariant_D(geom, H, x)));
    case Convention::DampedLiteral: {
      auto v = nghs_velocity(geom, H, x);
      const T w = w_dynamics(geom, H, x);
      for (int b = 0; b < geom.n; ++b) v[b] -= w * x[b];
      return v;
    }
    case Convention::NghsLiteral:
      return nghs_velocity(geom, H, x);
  }
  return {};
}

std::vector<double> rhs(const PoissonWManifold& M, const ScalarExpr& H, Convention convention,
                        std::span<const double> x);

struct TrajectoryConfig {
  const PoissonWManifold* manifold = nullptr;
  ScalarExpr H;
  std::vector<double> x0;
  double t0 = 0.0;
  double t1 = 1.0;
  double h = 1e-3;  // RK4 step; output grid spacing for both methods
  Method method = Method::RK4;
  Convention convention = Convention::Transport;
  std::vector<ScalarExpr> observables;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double min_step = 1e-12;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<double> w;
  std::vector<double> H;
  std::vector<double> s;  // integral of w from t0
  std::vector<double> I;  // H * exp(s)
  std::vector<std::vector<double>> observables;  // [observable][sample]
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_good_t)
      : std::runtime_error(what + " (last good t = " + std::to_string(last_good_t) + ")"), last_t_(last_good_t) {}
  double last_good_t() const noexcept { return last_t_; }

 private:
  double last_t_;
};

/// Integrates the augmented state (x, s) with s' = w(x) on the grid t0, t0+h, ..., t1.
Trajectory integrate(const TrajectoryConfig& config);

/// r = grad f . rhs + w f - {H,f}.
double transport_residual(const PoissonWManifold& M, const ScalarExpr& H, const ScalarExpr& f,
                          std::span<const double> x, Convention convention);

/**
 * Second covariant time derivative of f along the transport flow through x:
 *   lhs = f'' + 2 w f' + beta f, beta = w^2 + w'
 *   rhs = d/dt {H,f} + w {H,f}
 */
template <class F>
Pair<double> second_order_at(const PoissonWManifold& M, const ScalarExpr& H, const F& f, std::span<const double> x) {
  auto velocity = [&]<class U>(std::span<const U> y) {
    return flow_rhs(M.at(y), H, Convention::Transport, y);
  };
  auto fdot = [&]<class U>(std::span<const U> y) { return apply_field(gradient(f, y), velocity(y)); };
  auto w = [&]<class U>(std::span<const U> y) { return w_dynamics(M.at(y), H, y); };
  auto bracket = [&]<class U>(std::span<const U> y) { return gpwb(M.at(y), H, f, y); };

  const auto xdot = velocity(x);
  double fv = 0.0, fd = 0.0, wv = 0.0, bv = 0.0;
  const auto df = gradient(f, x, &fv);
  fd = apply_field(df, xdot);
  const double fdd = apply_field(gradient(fdot, x), xdot);
  const double wdot = apply_field(gradient(w, x, &wv), xdot);
  const double bdot = apply_field(gradient(bracket, x, &bv), xdot);
  const double beta = wv * wv + wdot;

  return {fdd + 2.0 * wv * fd + beta * fv, bdot + wv * bv};
}

/// second_order_at evaluated at the grid point nearest t; t must be interior.
Pair<double> second_order(const PoissonWManifold& M, const ScalarExpr& H, const Trajectory& traj, double t,
                          const ScalarExpr& f);

/// F°_k = -D_k H + p_k w (phase-space reading of p_k).
std::vector<double> covariant_force(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);

struct ReciprocalTensor {
  Matrix<double> f;        // D_j F°_k - D_k F°_j
  Matrix<double> claimed;  // u_jk + L_kj w + (L_kj chi) w, meaningful for j != k
};
ReciprocalTensor reciprocal_tensor(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);

struct DivergenceIdentity {
  double lhs = 0.0;          // sum_k D_k (v_k + w x_k)
  double rhs_claimed = 0.0;    // div v + x.Dw + 2w
  double rhs_derived = 0.0;  // sum_k E_k v_k + A.v + x.Dw + w tr(e)
};
DivergenceIdentity divergence_identity(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);

/// Per j: lhs = sum_i c_ij^k D_k g^i with g^i = v^i + w x^i; rhs as claimed.
std::vector<Pair<double>> flow_commutator_identity(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);

/// sum_i [D_i,D_j] g^i from third-order nested jets (cross-check of flow_commutator_identity lhs).
std::vector<double> flow_commutator_literal_lhs(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);

/// Per (i,j): lhs = [D_i,D_j]{H,f} (literal), rhs = c_ij^k D_k {H,f} + w c_ij^k E_k f.
std::vector<Pair<double>> general_operator_identity(const PoissonWManifold& M, const ScalarExpr& H,
                                                    const ScalarExpr& f, std::span<const double> x);

}  // namespace gchs
