#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace gchs {

/// Largest number of coordinates a field may depend on.
inline constexpr int kMaxDim = 8;

/**
 * Forward-mode dual number with up to kMaxDim tangent directions.
 *
 * The value and tangent entries are themselves of type T, so Dual<Dual<double>>
 * carries second derivatives and Dual<Dual<Dual<double>>> third derivatives.
 * Only the first `n` tangent entries are active; entries at or past `n` are
 * always zero, which lets constants (n == 0) skip the tangent loops.
 */
template <class T>
struct Dual {
  T v{};
  std::array<T, kMaxDim> d{};
  int n = 0;

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT: constants convert implicitly

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v + b.v;
    r.n = std::max(a.n, b.n);
    for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v - b.v;
    r.n = std::max(a.n, b.n);
    for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
  }
  friend Dual operator-(const Dual& a) {
    Dual r;
    r.v = -a.v;
    r.n = a.n;
    for (int i = 0; i < r.n; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    r.n = std::max(a.n, b.n);
    if (a.n == 0) {
      for (int i = 0; i < r.n; ++i) r.d[i] = a.v * b.d[i];
    } else if (b.n == 0) {
      for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * b.v;
    } else {
      for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    }
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v / b.v;
    r.n = std::max(a.n, b.n);
    if (b.n == 0) {
      for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] / b.v;
    } else {
      for (int i = 0; i < r.n; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
    }
    return r;
  }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

/// The innermost double of a possibly nested dual.
inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

inline bool all_finite(double x) { return std::isfinite(x); }
template <class T>
bool all_finite(const Dual<T>& x) {
  if (!all_finite(x.v)) return false;
  for (int i = 0; i < x.n; ++i)
    if (!all_finite(x.d[i])) return false;
  return true;
}

namespace detail {
template <class T>
Dual<T> chain(const Dual<T>& a, T value, const T& slope) {
  Dual<T> r;
  r.v = std::move(value);
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.d[i] = slope * a.d[i];
  return r;
}
}  // namespace detail

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tanh;

template <class T>
Dual<T> sin(const Dual<T>& a) {
  return detail::chain(a, sin(a.v), cos(a.v));
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  return detail::chain(a, cos(a.v), T(-sin(a.v)));
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return detail::chain(a, e, e);
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return detail::chain(a, log(a.v), T(T(1.0) / a.v));
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return detail::chain(a, s, T(T(0.5) / s));
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  T t = tanh(a.v);
  return detail::chain(a, t, T(T(1.0) - t * t));
}

/// x^k by repeated squaring; exact for any carrier type.
template <class T>
T ipow(const T& x, long k) {
  if (k < 0) return T(1.0) / ipow(x, -k);
  T result(1.0);
  T base = x;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

/// Seed a point as independent variables: y[a] = x[a] + e_a.
template <class T>
std::vector<Dual<T>> seed(std::span<const T> x) {
  const int n = static_cast<int>(x.size());
  std::vector<Dual<T>> y(x.size());
  for (int a = 0; a < n; ++a) {
    y[a].v = x[a];
    y[a].n = n;
    y[a].d[a] = T(1.0);
  }
  return y;
}

}  // namespace gchs
