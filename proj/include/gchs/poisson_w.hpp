#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gchs/jet.hpp"
#include "gchs/manifold.hpp"
#include "gchs/scalar_expr.hpp"

namespace gchs {

/*
 * Generalized Poisson-W bracket machinery.
 *
 * Every routine here is a template over the numeric carrier T and over the
 * field type, so composite quantities (a bracket of brackets, the derivative
 * of a vector-field component) are built by passing generic lambdas
 * `[&]<class U>(std::span<const U> y) { ... }` back in. Differentiating such a
 * lambda evaluates it one nesting level deeper.
 *
 * With a frame present, every "partial_i" reads as the frame derivative E_i.
 * Vector-field values are returned as coordinate components (coefficients of
 * d_a), and X_f = J_ij (E_i f) E_j, so component b of X_f is
 * sum_j (sum_i J_ij E_i f) e_j^b.
 */

/// E_i f at x (frame derivatives; plain gradient in the coordinate frame).
template <class T, class F>
std::vector<T> frame_derivative(const LocalGeometry<T>& geom, const F& f, std::span<const T> x, T* value = nullptr) {
  return geom.directional(gradient(f, x, value));
}

/// D_i f = E_i f + A_i f.
template <class T, class F>
std::vector<T> covariant_D(const LocalGeometry<T>& geom, const F& f, std::span<const T> x, T* value = nullptr) {
  T fv(0.0);
  std::vector<T> D = frame_derivative(geom, f, x, &fv);
  for (int i = 0; i < geom.n; ++i) D[i] += geom.A[i] * fv;
  if (value) *value = fv;
  return D;
}

/// J_ij a_i b_j.
template <class T>
T contract(const LocalGeometry<T>& geom, const std::vector<T>& a, const std::vector<T>& b) {
  T acc(0.0);
  for (int i = 0; i < geom.n; ++i)
    for (int j = 0; j < geom.n; ++j) acc += geom.J(i, j) * a[i] * b[j];
  return acc;
}

/// {f,g} = J_ij D_i f D_j g.
template <class T, class F, class G>
T gpwb(const LocalGeometry<T>& geom, const F& f, const G& g, std::span<const T> x) {
  return contract(geom, covariant_D(geom, f, x), covariant_D(geom, g, x));
}

template <class T, class F, class G>
T gpwb(const PoissonWManifold& M, const F& f, const G& g, std::span<const T> x) {
  return gpwb(M.at(x), f, g, x);
}

template <class T>
struct BracketParts {
  T ghs{};   // J_ij E_i f E_j g
  T xchi{};  // f X_chi g - g X_chi f
};

template <class T, class F, class G>
BracketParts<T> gpwb_decomposed(const LocalGeometry<T>& geom, const F& f, const G& g, std::span<const T> x) {
  T fv(0.0), gv(0.0);
  auto Ef = frame_derivative(geom, f, x, &fv);
  auto Eg = frame_derivative(geom, g, x, &gv);
  BracketParts<T> parts;
  parts.ghs = contract(geom, Ef, Eg);
  const T xchi_g = contract(geom, geom.A, Eg);
  const T xchi_f = contract(geom, geom.A, Ef);
  parts.xchi = fv * xchi_g - gv * xchi_f;
  return parts;
}

/// Coordinate components of sum_j c_j E_j.
template <class T>
std::vector<T> to_coordinates(const LocalGeometry<T>& geom, const std::vector<T>& c) {
  if (geom.coordinate_frame()) return c;
  std::vector<T> out(geom.n, T(0.0));
  for (int j = 0; j < geom.n; ++j)
    for (int b = 0; b < geom.n; ++b) out[b] += c[j] * geom.frame(j, b);
  return out;
}

/// Frame coefficients c_j = sum_i J_ij a_i.
template <class T>
std::vector<T> raise(const LocalGeometry<T>& geom, const std::vector<T>& a) {
  std::vector<T> c(geom.n, T(0.0));
  for (int j = 0; j < geom.n; ++j) {
    T acc(0.0);
    for (int i = 0; i < geom.n; ++i) acc += geom.J(i, j) * a[i];
    c[j] = acc;
  }
  return c;
}

template <class T, class F>
std::vector<T> vec_X(const LocalGeometry<T>& geom, const F& f, std::span<const T> x) {
  return to_coordinates(geom, raise(geom, frame_derivative(geom, f, x)));
}

template <class T>
std::vector<T> vec_X_chi(const LocalGeometry<T>& geom) {
  return to_coordinates(geom, raise(geom, geom.A));
}

/// X_f^M = X_f + f X_chi.
template <class T, class F>
std::vector<T> vec_XM(const LocalGeometry<T>& geom, const F& f, std::span<const T> x) {
  T fv(0.0);
  auto Ef = frame_derivative(geom, f, x, &fv);
  auto Xf = to_coordinates(geom, raise(geom, Ef));
  auto Xchi = vec_X_chi(geom);
  for (int b = 0; b < geom.n; ++b) Xf[b] += fv * Xchi[b];
  return Xf;
}

/// w = {H,1} = J_ij D_i H A_j.
template <class T, class F>
T w_dynamics(const LocalGeometry<T>& geom, const F& H, std::span<const T> x) {
  return contract(geom, covariant_D(geom, H, x), geom.A);
}

template <class T, class F>
T w_dynamics(const PoissonWManifold& M, const F& H, std::span<const T> x) {
  return w_dynamics(M.at(x), H, x);
}

/// X_H chi = J_ij (E_i H) A_j, the alternative reading of w.
template <class T, class F>
T w_from_hamiltonian_field(const LocalGeometry<T>& geom, const F& H, std::span<const T> x) {
  return contract(geom, frame_derivative(geom, H, x), geom.A);
}

/// V(g) = sum_b V^b d_b g for coordinate components V.
template <class T>
T apply_field(const std::vector<T>& V, const std::vector<T>& grad) {
  T acc(0.0);
  for (std::size_t b = 0; b < V.size(); ++b) acc += V[b] * grad[b];
  return acc;
}

/// Lie bracket of two vector fields, each a callable returning coordinate components.
template <class T, class V, class W>
std::vector<T> lie_bracket(const V& vfield, const W& wfield, std::span<const T> x) {
  std::vector<T> v, w;
  std::vector<std::vector<T>> dv, dw;
  jacobian(vfield, x, v, dv);
  jacobian(wfield, x, w, dw);
  const std::size_t n = x.size();
  std::vector<T> out(n, T(0.0));
  for (std::size_t b = 0; b < n; ++b) {
    T acc(0.0);
    for (std::size_t a = 0; a < n; ++a) acc += v[a] * dw[b][a] - w[a] * dv[b][a];
    out[b] = acc;
  }
  return out;
}

/// Vector field from n component expressions.
struct ExprVectorField {
  std::vector<ScalarExpr> components;

  template <class U>
  std::vector<U> operator()(std::span<const U> y) const {
    std::vector<U> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c(y));
    return out;
  }
};

template <class T>
struct Pair {
  T lhs{};
  T rhs{};
};

/**
 * Both sides of the Lie-bracket expansion
 *   [X_f^M, X_g^M] = [X_f,X_g] + f[X_chi,X_g] + g[X_f,X_chi] + (2 X_f g + X_chi(f,g)) X_chi
 * applied to K. The left side brackets the assembled fields X_f + f X_chi directly.
 */
template <class F, class G, class K>
Pair<double> bracket_XM_expansion(const PoissonWManifold& M, const F& f, const G& g, const K& k,
                                  std::span<const double> x) {
  auto Xf = [&]<class U>(std::span<const U> y) { return vec_X(M.at(y), f, y); };
  auto Xg = [&]<class U>(std::span<const U> y) { return vec_X(M.at(y), g, y); };
  auto Xchi = [&]<class U>(std::span<const U> y) { return vec_X_chi(M.at(y)); };
  auto XfM = [&]<class U>(std::span<const U> y) {
    auto geom = M.at(y);
    auto out = vec_X(geom, f, y);
    auto xc = vec_X_chi(geom);
    const U fv = f(y);
    for (std::size_t b = 0; b < out.size(); ++b) out[b] += fv * xc[b];
    return out;
  };
  auto XgM = [&]<class U>(std::span<const U> y) {
    auto geom = M.at(y);
    auto out = vec_X(geom, g, y);
    auto xc = vec_X_chi(geom);
    const U gv = g(y);
    for (std::size_t b = 0; b < out.size(); ++b) out[b] += gv * xc[b];
    return out;
  };

  double kv = 0.0, fv = 0.0, gv = 0.0;
  const auto dK = gradient(k, x, &kv);
  const auto df = gradient(f, x, &fv);
  const auto dg = gradient(g, x, &gv);

  Pair<double> out;
  out.lhs = apply_field(lie_bracket(XfM, XgM, x), dK);

  const auto xchi = Xchi(x);
  const auto xf = Xf(x);
  const double xf_g = apply_field(xf, dg);
  const double xchi_pair = fv * apply_field(xchi, dg) - gv * apply_field(xchi, df);
  out.rhs = apply_field(lie_bracket(Xf, Xg, x), dK) + fv * apply_field(lie_bracket(Xchi, Xg, x), dK) +
            gv * apply_field(lie_bracket(Xf, Xchi, x), dK) + (2.0 * xf_g + xchi_pair) * apply_field(xchi, dK);
  return out;
}

/**
 * Hamiltonian specialization of the expansion:
 *   lhs = [X_f^M,X_g^M]H - [X_f,X_g]H
 *   rhs = 2 w X_f g + fX(f,g),  fX = w X_chi + X_w + X_chi X_H,
 * with an operator applied to a pair read as O(f,g) = f O g - g O f.
 */
template <class F, class G, class Hf>
Pair<double> hamiltonian_specialization(const PoissonWManifold& M, const F& f, const G& g, const Hf& H,
                                        std::span<const double> x) {
  auto Xf = [&]<class U>(std::span<const U> y) { return vec_X(M.at(y), f, y); };
  auto Xg = [&]<class U>(std::span<const U> y) { return vec_X(M.at(y), g, y); };
  auto XfM = [&]<class U>(std::span<const U> y) { return vec_XM(M.at(y), f, y); };
  auto XgM = [&]<class U>(std::span<const U> y) { return vec_XM(M.at(y), g, y); };
  auto w = [&]<class U>(std::span<const U> y) { return w_dynamics(M.at(y), H, y); };
  auto XH_f = [&]<class U>(std::span<const U> y) { return apply_field(vec_X(M.at(y), H, y), gradient(f, y)); };
  auto XH_g = [&]<class U>(std::span<const U> y) { return apply_field(vec_X(M.at(y), H, y), gradient(g, y)); };

  const auto geom = M.at(x);
  double fv = 0.0, gv = 0.0;
  const auto df = gradient(f, x, &fv);
  const auto dg = gradient(g, x, &gv);
  const auto dH = gradient(H, x);
  const double wv = w_dynamics(geom, H, x);

  const auto xchi = vec_X_chi(geom);
  const auto xw = vec_X(geom, w, x);
  auto pair = [&](const std::vector<double>& field) { return fv * apply_field(field, dg) - gv * apply_field(field, df); };
  const double xchi_xh = fv * apply_field(xchi, gradient(XH_g, x)) - gv * apply_field(xchi, gradient(XH_f, x));

  Pair<double> out;
  out.lhs = apply_field(lie_bracket(XfM, XgM, x), dH) - apply_field(lie_bracket(Xf, Xg, x), dH);
  out.rhs = 2.0 * wv * apply_field(vec_X(geom, f, x), dg) + wv * pair(xchi) + pair(xw) + xchi_xh;
  return out;
}

/// Omega(u,v) = sum_i (u^{p_i} v^{q_i} - u^{q_i} v^{p_i}); canonical structure only.
double omega_pair(const PoissonWManifold& M, std::span<const double> u, std::span<const double> v);

// Double-precision entry points over expression fields.
std::vector<double> structural_derivative(const PoissonWManifold& M, std::span<const double> x);
std::vector<double> covariant_D(const PoissonWManifold& M, const ScalarExpr& f, std::span<const double> x);
double gpwb(const PoissonWManifold& M, const ScalarExpr& f, const ScalarExpr& g, std::span<const double> x);
BracketParts<double> gpwb_decomposed(const PoissonWManifold& M, const ScalarExpr& f, const ScalarExpr& g,
                                     std::span<const double> x);
std::vector<double> vec_X(const PoissonWManifold& M, const ScalarExpr& f, std::span<const double> x);
std::vector<double> vec_X_chi(const PoissonWManifold& M, std::span<const double> x);
std::vector<double> vec_XM(const PoissonWManifold& M, const ScalarExpr& f, std::span<const double> x);
double w_dynamics(const PoissonWManifold& M, const ScalarExpr& H, std::span<const double> x);
std::vector<double> lie_bracket(const ExprVectorField& V, const ExprVectorField& W, std::span<const double> x);

}  // namespace gchs
