#include "gchs/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace gchs {

std::string to_string(Convention c) {
  switch (c) {
    case Convention::Transport: return "transport";
    case Convention::DampedLiteral: return "damped-literal";
    case Convention::NghsLiteral: return "nghs-literal";
  }
  return "?";
}

std::string to_string(Method m) { return m == Method::RK4 ? "RK4" : "RK45"; }

std::optional<Convention> parse_convention(std::string_view text) {
  if (text == "transport") return Convention::Transport;
  if (text == "damped-literal") return Convention::DampedLiteral;
  if (text == "nghs-literal") return Convention::NghsLiteral;
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "RK4" || text == "rk4") return Method::RK4;
  if (text == "RK45" || text == "rk45") return Method::RK45;
  return std::nullopt;
}

std::vector<double> rhs(const PoissonWManifold& M, const ScalarExpr& H, Convention convention,
                        std::span<const double> x) {
  return flow_rhs(M.at(x), H, convention, x);
}

namespace {

using State = std::vector<double>;

// Augmented derivative: (x', s') = (rhs(x), w(x)).
State augmented_rhs(const TrajectoryConfig& cfg, const State& y) {
  const int n = cfg.manifold->dim();
  std::span<const double> x(y.data(), n);
  const auto geom = cfg.manifold->at(x);
  State out = flow_rhs(geom, cfg.H, cfg.convention, x);
  out.push_back(w_dynamics(geom, cfg.H, x));
  for (double v : out)
    if (!std::isfinite(v)) throw NumericDomainError("non-finite derivative");
  return out;
}

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * coef * (*k)[i];
  }
  return out;
}

State rk4_step(const TrajectoryConfig& cfg, const State& y, double h) {
  const State k1 = augmented_rhs(cfg, y);
  const State k2 = augmented_rhs(cfg, axpy(y, h, {{0.5, &k1}}));
  const State k3 = augmented_rhs(cfg, axpy(y, h, {{0.5, &k2}}));
  const State k4 = augmented_rhs(cfg, axpy(y, h, {{1.0, &k3}}));
  return axpy(y, h, {{1.0 / 6.0, &k1}, {1.0 / 3.0, &k2}, {1.0 / 3.0, &k3}, {1.0 / 6.0, &k4}});
}

void record(const TrajectoryConfig& cfg, Trajectory& traj, double t, const State& y) {
  const int n = cfg.manifold->dim();
  std::span<const double> x(y.data(), n);
  traj.times.push_back(t);
  traj.states.emplace_back(y.begin(), y.begin() + n);
  traj.w.push_back(w_dynamics(cfg.manifold->at(x), cfg.H, x));
  const double H = cfg.H(x);
  traj.H.push_back(H);
  traj.s.push_back(y[n]);
  traj.I.push_back(H * std::exp(y[n]));
  for (std::size_t k = 0; k < cfg.observables.size(); ++k) traj.observables[k].push_back(cfg.observables[k](x));
}

std::vector<double> output_grid(const TrajectoryConfig& cfg) {
  std::vector<double> grid;
  const double span = cfg.t1 - cfg.t0;
  const auto steps = static_cast<long>(std::ceil(span / cfg.h - 1e-9));
  grid.reserve(steps + 1);
  for (long k = 0; k < steps; ++k) grid.push_back(cfg.t0 + static_cast<double>(k) * cfg.h);
  grid.push_back(cfg.t1);
  return grid;
}

void integrate_rk4(const TrajectoryConfig& cfg, Trajectory& traj, State y, const std::vector<double>& grid) {
  record(cfg, traj, grid.front(), y);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double h = grid[k] - grid[k - 1];
    try {
      y = rk4_step(cfg, y, h);
    } catch (const NumericDomainError& e) {
      throw IntegrationError(std::string("step failed: ") + e.what(), grid[k - 1]);
    }
    for (double v : y)
      if (!std::isfinite(v)) throw IntegrationError("step produced a non-finite state", grid[k - 1]);
    record(cfg, traj, grid[k], y);
  }
}

// Dormand-Prince 5(4).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 - -92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

void integrate_rk45(const TrajectoryConfig& cfg, Trajectory& traj, State y, const std::vector<double>& grid) {
  (void)c2, (void)c3, (void)c4, (void)c5;
  record(cfg, traj, grid.front(), y);
  double t = cfg.t0;
  double h = cfg.h;
  State k1 = augmented_rhs(cfg, y);
  std::size_t next = 1;
  while (next < grid.size()) {
    h = std::min(h, cfg.t1 - t);
    if (h < cfg.min_step && t + h < cfg.t1) throw IntegrationError("step size underflow", t);
    State k2, k3, k4, k5, k6, k7, ynew;
    double err = 0.0;
    try {
      k2 = augmented_rhs(cfg, axpy(y, h, {{a21, &k1}}));
      k3 = augmented_rhs(cfg, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      k4 = augmented_rhs(cfg, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      k5 = augmented_rhs(cfg, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      k6 = augmented_rhs(cfg, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      ynew = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      k7 = augmented_rhs(cfg, ynew);
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double est = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err += (est / scale) * (est / scale);
      }
      err = std::sqrt(err / static_cast<double>(y.size()));
    } catch (const NumericDomainError&) {
      err = std::numeric_limits<double>::infinity();
    }

    if (!(err <= 1.0)) {
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      if (h < cfg.min_step) throw IntegrationError("step size underflow", t);
      continue;
    }

    const double t_new = t + h;
    // Cubic Hermite interpolation onto the output grid.
    while (next < grid.size() && grid[next] <= t_new + 1e-12 * std::max(1.0, std::abs(t_new))) {
      const double theta = std::clamp((grid[next] - t) / h, 0.0, 1.0);
      const double h00 = (1 + 2 * theta) * (1 - theta) * (1 - theta);
      const double h10 = theta * (1 - theta) * (1 - theta);
      const double h01 = theta * theta * (3 - 2 * theta);
      const double h11 = theta * theta * (theta - 1);
      State yi(y.size());
      for (std::size_t i = 0; i < y.size(); ++i)
        yi[i] = h00 * y[i] + h10 * h * k1[i] + h01 * ynew[i] + h11 * h * k7[i];
      record(cfg, traj, grid[next], yi);
      ++next;
    }
    t = t_new;
    y = std::move(ynew);
    k1 = std::move(k7);
    h *= std::min(5.0, std::max(0.2, err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0));
  }
}

}  // namespace

Trajectory integrate(const TrajectoryConfig& cfg) {
  if (!cfg.manifold) throw StructureError("trajectory config has no manifold");
  const int n = cfg.manifold->dim();
  if (static_cast<int>(cfg.x0.size()) != n) throw StructureError("initial state dimension mismatch");
  if (!(cfg.h > 0.0) || !(cfg.t1 > cfg.t0)) throw StructureError("need h > 0 and t1 > t0");
  if (cfg.method == Method::RK45 && !(cfg.rel_tol >= 1e-12)) throw StructureError("RK45 needs rel_tol >= 1e-12");

  Trajectory traj;
  traj.observables.resize(cfg.observables.size());
  State y = cfg.x0;
  y.push_back(0.0);
  const auto grid = output_grid(cfg);
  if (cfg.method == Method::RK4)
    integrate_rk4(cfg, traj, std::move(y), grid);
  else
    integrate_rk45(cfg, traj, std::move(y), grid);
  return traj;
}

double transport_residual(const PoissonWManifold& M, const ScalarExpr& H, const ScalarExpr& f,
                          std::span<const double> x, Convention convention) {
  const auto geom = M.at(x);
  double fv = 0.0;
  const auto df = gradient(f, x, &fv);
  const auto v = flow_rhs(geom, H, convention, x);
  return apply_field(df, v) + w_dynamics(geom, H, x) * fv - gpwb(geom, H, f, x);
}

Pair<double> second_order(const PoissonWManifold& M, const ScalarExpr& H, const Trajectory& traj, double t,
                          const ScalarExpr& f) {
  if (traj.times.size() < 3) throw StructureError("trajectory too short for an interior point");
  const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
  std::size_t k = static_cast<std::size_t>(it - traj.times.begin());
  if (k > 0 && (k == traj.times.size() || std::abs(traj.times[k - 1] - t) < std::abs(traj.times[k] - t))) --k;
  if (k == 0 || k + 1 >= traj.times.size()) throw StructureError("time is not an interior grid point");
  return second_order_at(M, H, f, std::span<const double>(traj.states[k]));
}

namespace {

template <class U>
std::vector<U> covariant_force_at(const PoissonWManifold& M, const ScalarExpr& H, std::span<const U> y) {
  const auto geom = M.at(y);
  auto F = covariant_D(geom, H, y);
  const U w = w_dynamics(geom, H, y);
  for (int k = 0; k < geom.n; ++k) F[k] = momentum_value(y, k) * w - F[k];
  return F;
}

void require_phase_split(const PoissonWManifold& M) {
  if (!M.phase_split()) throw StructureError("operation needs an even-dimensional phase space");
}

}  // namespace

std::vector<double> covariant_force(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  require_phase_split(M);
  return covariant_force_at(M, H, x);
}

ReciprocalTensor reciprocal_tensor(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  require_phase_split(M);
  const int n = M.dim();
  auto Fcov = [&]<class U>(std::span<const U> y) { return covariant_force_at(M, H, y); };
  auto w = [&]<class U>(std::span<const U> y) { return w_dynamics(M.at(y), H, y); };
  const auto geom = M.at(x);
  const auto DF = covariant_derivative_of(M, Fcov, x);  // (j,k) = D_j F°_k
  const auto u = u_tensor(M, H, x);
  const auto Ew = frame_derivative(geom, w, x);
  const auto Echi = frame_derivative(geom, M.chi(), x);
  const double wv = w_dynamics(geom, H, x);

  ReciprocalTensor out{Matrix<double>(n, 0.0), Matrix<double>(n, 0.0)};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      out.f(k, j) = DF(j, k) - DF(k, j);
      const double pk = momentum_value(x, k), pj = momentum_value(x, j);
      const double L_w = pk * Ew[j] - pj * Ew[k];
      const double L_chi = pk * Echi[j] - pj * Echi[k];
      out.claimed(k, j) = u(j, k) + L_w + L_chi * wv;
    }
  return out;
}

DivergenceIdentity divergence_identity(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  const int n = M.dim();
  auto v = [&]<class U>(std::span<const U> y) { return nghs_velocity(M.at(y), H, y); };
  auto w = [&]<class U>(std::span<const U> y) { return w_dynamics(M.at(y), H, y); };
  auto g = [&]<class U>(std::span<const U> y) {
    auto out = nghs_velocity(M.at(y), H, y);
    const U wy = w_dynamics(M.at(y), H, y);
    for (int k = 0; k < n; ++k) out[k] += wy * y[k];
    return out;
  };
  const auto geom = M.at(x);

  DivergenceIdentity out;
  const auto Dg = covariant_derivative_of(M, g, x);
  for (int k = 0; k < n; ++k) out.lhs += Dg(k, k);

  std::vector<double> vv;
  std::vector<std::vector<double>> dv;
  jacobian(v, x, vv, dv);
  double wv = 0.0;
  const auto dw = gradient(w, x, &wv);
  const auto Ew = geom.directional(dw);

  double div_v = 0.0, frame_div_v = 0.0, A_dot_v = 0.0, x_dot_Dw = 0.0, trace_e = 0.0;
  for (int k = 0; k < n; ++k) {
    div_v += dv[k][k];
    for (int a = 0; a < n; ++a) frame_div_v += geom.e(k, a) * dv[k][a];
    A_dot_v += geom.A[k] * vv[k];
    x_dot_Dw += x[k] * (Ew[k] + geom.A[k] * wv);
    trace_e += geom.e(k, k);
  }
  out.rhs_claimed = div_v + x_dot_Dw + 2.0 * wv;
  out.rhs_derived = frame_div_v + A_dot_v + x_dot_Dw + wv * trace_e;
  return out;
}

std::vector<Pair<double>> flow_commutator_identity(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  const int n = M.dim();
  const auto sf = structure_functions(M, x);
  auto w = [&]<class U>(std::span<const U> y) { return w_dynamics(M.at(y), H, y); };
  auto g = [&]<class U>(std::span<const U> y) {
    auto out = nghs_velocity(M.at(y), H, y);
    const U wy = w_dynamics(M.at(y), H, y);
    for (int k = 0; k < n; ++k) out[k] += wy * y[k];
    return out;
  };
  auto vfield = [&]<class U>(std::span<const U> y) { return nghs_velocity(M.at(y), H, y); };
  const auto geom = M.at(x);
  const auto Dg = covariant_derivative_of(M, g, x);  // (k,i) = D_k g^i

  std::vector<double> v;
  std::vector<std::vector<double>> dv;
  jacobian(vfield, x, v, dv);
  double div_v = 0.0;
  for (int k = 0; k < n; ++k) div_v += dv[k][k];
  double wv = 0.0;
  const auto Dw = covariant_D(geom, w, x, &wv);

  std::vector<Pair<double>> out(n);
  for (int j = 0; j < n; ++j) {
    double lhs = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) lhs += sf(i, j, k) * Dg(k, i);

    double trace_c = 0.0;
    for (int i = 0; i < n; ++i) trace_c += sf(i, j, i);
    double theta_Dw = 0.0;
    for (int k = 0; k < n; ++k) {
      double theta = 0.0;
      for (int i = 0; i < n; ++i) theta += x[i] * sf(i, j, k);
      theta_Dw += theta * Dw[k];
    }
    double wA = 0.0;
    for (int i = 0; i < n; ++i) {
      double wji = 0.0;
      for (int k = 0; k < n; ++k) wji += v[k] * sf(k, j, i);
      wA += wji * geom.A[i];
    }
    out[j] = {lhs, trace_c * (div_v + wv) + theta_Dw + wA};
  }
  return out;
}

std::vector<double> flow_commutator_literal_lhs(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x) {
  const int n = M.dim();
  auto g = [&]<class U>(std::span<const U> y) {
    auto out = nghs_velocity(M.at(y), H, y);
    const U wy = w_dynamics(M.at(y), H, y);
    for (int k = 0; k < n; ++k) out[k] += wy * y[k];
    return out;
  };
  // Flattened (k,i) -> D_k g^i.
  auto Dg = [&]<class U>(std::span<const U> y) {
    const auto m = covariant_jacobian(M.at(y), g, y);
    return m.data;
  };
  const auto geom = M.at(x);
  std::vector<double> vals;
  std::vector<std::vector<double>> jac;
  jacobian(Dg, x, vals, jac);
  auto D_of = [&](int outer, int k, int i) {  // D_outer (D_k g^i)
    const std::size_t idx = static_cast<std::size_t>(k) * n + i;
    double acc = geom.A[outer] * vals[idx];
    for (int a = 0; a < n; ++a) acc += geom.e(outer, a) * jac[idx][a];
    return acc;
  };
  std::vector<double> out(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out[j] += D_of(i, j, i) - D_of(j, i, i);
  return out;
}

std::vector<Pair<double>> general_operator_identity(const PoissonWManifold& M, const ScalarExpr& H,
                                                    const ScalarExpr& f, std::span<const double> x) {
  const int n = M.dim();
  const auto sf = structure_functions(M, x);
  auto bracket = [&]<class U>(std::span<const U> y) { return gpwb(M.at(y), H, f, y); };
  const auto geom = M.at(x);
  const auto literal = covariant_commutator(M, bracket, x);
  const auto structural = structural_commutator(M, sf, bracket, x);
  const auto Ef = frame_derivative(geom, f, x);
  const double wv = w_dynamics(geom, H, x);

  std::vector<Pair<double>> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double extra = 0.0;
      for (int k = 0; k < n; ++k) extra += sf(i, j, k) * Ef[k];
      out.push_back({literal(i, j), structural(i, j) + wv * extra});
    }
  return out;
}

}  // namespace gchs
