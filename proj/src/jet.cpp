#include "gchs/jet.hpp"

#include <string>

namespace gchs {

namespace {

double tangent(const Dual<double>& d, int a) { return a < d.n ? d.d[a] : 0.0; }

template <class T>
const T& component(const Dual<T>& d, int a) {
  static const T zero(0.0);
  return a < d.n ? d.d[a] : zero;
}

}  // namespace

Jet eval_jet(const ScalarExpr& f, std::span<const double> x, int order) {
  const int n = static_cast<int>(x.size());
  if (n != f.dim()) throw StructureError("point dimension does not match field");
  Jet jet;
  jet.order = order;
  jet.first.assign(n, 0.0);

  switch (order) {
    case 1: {
      auto y = seed(x);
      Dual<double> r = f(std::span<const Dual<double>>(y));
      jet.value = r.v;
      for (int a = 0; a < n; ++a) jet.first[a] = tangent(r, a);
      break;
    }
    case 2: {
      using D1 = Dual<double>;
      std::vector<D1> inner(x.size());
      for (int a = 0; a < n; ++a) {
        inner[a].v = x[a];
        inner[a].n = n;
        inner[a].d[a] = 1.0;
      }
      auto y = seed(std::span<const D1>(inner));
      Dual<D1> r = f(std::span<const Dual<D1>>(y));
      jet.value = r.v.v;
      jet.second.assign(n * n, 0.0);
      for (int a = 0; a < n; ++a) {
        jet.first[a] = tangent(r.v, a);
        for (int b = 0; b < n; ++b) jet.second[a * n + b] = tangent(component(r, a), b);
      }
      break;
    }
    case 3: {
      using D1 = Dual<double>;
      using D2 = Dual<D1>;
      std::vector<D1> level1(x.size());
      for (int a = 0; a < n; ++a) {
        level1[a].v = x[a];
        level1[a].n = n;
        level1[a].d[a] = 1.0;
      }
      std::vector<D2> level2 = seed(std::span<const D1>(level1));
      auto y = seed(std::span<const D2>(level2));
      Dual<D2> r = f(std::span<const Dual<D2>>(y));
      jet.value = r.v.v.v;
      jet.second.assign(n * n, 0.0);
      jet.third.assign(n * n * n, 0.0);
      for (int a = 0; a < n; ++a) {
        jet.first[a] = tangent(r.v.v, a);
        for (int b = 0; b < n; ++b) {
          jet.second[a * n + b] = tangent(component(r.v, a), b);
          for (int c = 0; c < n; ++c)
            jet.third[(a * n + b) * n + c] = tangent(component(component(r, a), b), c);
        }
      }
      break;
    }
    default:
      throw StructureError("jet order must be 1, 2 or 3, got " + std::to_string(order));
  }
  return jet;
}

}  // namespace gchs
