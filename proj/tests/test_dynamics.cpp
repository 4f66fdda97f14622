#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gchs/dynamics.hpp"
#include "support.hpp"

using namespace gchs;
using gchs::test::canonical2;
using gchs::test::ex;

namespace {

const ScalarExpr kOsc = ex("0.5*(q1^2+p1^2)", 2);

TrajectoryConfig oscillator(const PoissonWManifold& M, double t1, double h, Method method = Method::RK4) {
  TrajectoryConfig cfg;
  cfg.manifold = &M;
  cfg.H = kOsc;
  cfg.x0 = {1, 0};
  cfg.t1 = t1;
  cfg.h = h;
  cfg.method = method;
  return cfg;
}

double drift(const Trajectory& t) {
  double d = 0.0;
  for (double I : t.I) d = std::max(d, std::abs(I - t.I.front()));
  return d;
}

}  // namespace

TEST_CASE("flow right-hand sides") {
  const auto M = canonical2("q1");
  const std::vector<double> x{1, 2};
  const auto v = rhs(M, kOsc, Convention::Transport, x);
  CHECK(v[0] == doctest::Approx(-2.0));
  CHECK(v[1] == doctest::Approx(3.5));
  const auto nghs = rhs(M, kOsc, Convention::NghsLiteral, x);
  CHECK(nghs[0] == doctest::Approx(2.0));
  CHECK(nghs[1] == doctest::Approx(-3.5));
  const auto damped = rhs(M, kOsc, Convention::DampedLiteral, x);
  CHECK(damped[0] == doctest::Approx(2.0 + 2.0 * 1));
  CHECK(damped[1] == doctest::Approx(-3.5 + 2.0 * 2));
  const auto still = rhs(canonical2("0"), ex("3", 2), Convention::Transport, x);
  CHECK(still == std::vector<double>{0.0, 0.0});
}

TEST_CASE("convention names round-trip") {
  for (auto c : {Convention::Transport, Convention::DampedLiteral, Convention::NghsLiteral})
    CHECK(parse_convention(to_string(c)) == c);
  CHECK(!parse_convention("canonical"));
  CHECK(parse_method("rk45") == Method::RK45);
}

TEST_CASE("harmonic oscillator closed form") {
  const auto M = canonical2("0");
  for (auto method : {Method::RK4, Method::RK45}) {
    const auto traj = integrate(oscillator(M, 1.0, 1e-3, method));
    REQUIRE(traj.times.size() == 1001);
    CHECK(traj.times.back() == doctest::Approx(1.0));
    for (std::size_t k = 0; k < traj.times.size(); k += 50) {
      const double t = traj.times[k];
      CHECK(std::abs(traj.states[k][0] - std::cos(t)) <= 1e-6);
      CHECK(std::abs(traj.states[k][1] - std::sin(t)) <= 1e-6);
    }
  }
}

TEST_CASE("constant hamiltonian leaves the state fixed") {
  const auto M = canonical2("0");
  auto cfg = oscillator(M, 2.0, 0.1);
  cfg.H = ex("1.5", 2);
  cfg.x0 = {0.3, -0.2};
  const auto traj = integrate(cfg);
  for (const auto& s : traj.states) CHECK(s == cfg.x0);
}

TEST_CASE("invariant along the transport flow") {
  const auto M = canonical2("0.3*q1");
  const auto traj = integrate(oscillator(M, 10.0, 1e-3));
  CHECK(drift(traj) <= 1e-7);
  const double Hspread = *std::max_element(traj.H.begin(), traj.H.end()) - *std::min_element(traj.H.begin(), traj.H.end());
  CHECK(Hspread > 1e-3);  // H alone is not conserved
  auto tight = oscillator(M, 10.0, 1e-2, Method::RK45);
  tight.rel_tol = 1e-11;
  tight.abs_tol = 1e-13;
  const auto adaptive = integrate(tight);
  CHECK(drift(adaptive) <= 1e-7);
}

TEST_CASE("RK4 converges at fourth order") {
  const auto M = canonical2("0.3*q1");
  const double coarse = drift(integrate(oscillator(M, 10.0, 0.1)));
  const double fine = drift(integrate(oscillator(M, 10.0, 0.05)));
  const double ratio = coarse / fine;
  CHECK(ratio >= 16 * 0.8);
  CHECK(ratio <= 16 * 1.2);
}

TEST_CASE("integration reports the last good time") {
  const auto M = canonical2("0");
  auto cfg = oscillator(M, 2.0, 0.01);
  // q' = -p, p' = 1/q drives q through zero in finite time
  cfg.H = ex("0.5*p1^2 + log(q1)", 2);
  cfg.x0 = {0.5, 1};
  try {
    (void)integrate(cfg);
  } catch (const IntegrationError& e) {
    CHECK(e.last_good_t() >= 0.0);
    CHECK(e.last_good_t() < 2.0);
    return;
  }
  FAIL("expected the flow to leave the domain of log");
}

TEST_CASE("transport residual") {
  const auto M = canonical2("q1");
  SplitMix64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> x{2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
    const auto f = ex(test::random_field_text(rng, 2), 2);
    CHECK(std::abs(transport_residual(M, kOsc, f, x, Convention::Transport)) <= 1e-10);
  }
  for (auto c : {Convention::Transport, Convention::DampedLiteral, Convention::NghsLiteral})
    CHECK(std::abs(transport_residual(M, kOsc, ex("1", 2), std::vector<double>{0.4, 0.7}, c)) <= 1e-14);
  CHECK(std::abs(transport_residual(M, kOsc, ex("q1", 2), std::vector<double>{0.4, 0.7}, Convention::NghsLiteral)) > 1e-3);
}

TEST_CASE("second-order operator") {
  const auto M = canonical2("0");
  const auto traj = integrate(oscillator(M, 1.0, 1e-3));
  const auto r = second_order(M, kOsc, traj, 0.5, ex("q1", 2));
  CHECK(r.lhs == doctest::Approx(-std::cos(0.5)).epsilon(1e-6));
  CHECK(r.rhs == doctest::Approx(r.lhs).epsilon(1e-10));
  CHECK_THROWS_AS(second_order(M, kOsc, traj, 0.0, ex("q1", 2)), StructureError);

  const auto bent = test::heisenberg("x2");
  const auto Hh = ex("x1*x3 + 0.5*x2^2", 3);
  const auto s = second_order_at(bent, Hh, ex("sin(x1)*x3", 3), std::vector<double>{0.2, -0.4, 0.5});
  CHECK(std::abs(s.lhs - s.rhs) <= 1e-10);
}

TEST_CASE("covariant force") {
  const std::vector<double> x{1, 2};
  const auto flat = covariant_force(canonical2("0"), kOsc, x);
  CHECK(flat == std::vector<double>{-1.0, -2.0});
  const auto F = covariant_force(canonical2("q1"), kOsc, x);
  // -D H + p w with w = -2 and p = 2 for both slots of the n = 2 split
  CHECK(F[0] == doctest::Approx(-3.5 - 4.0));
  CHECK(F[1] == doctest::Approx(-2.0 - 4.0));
  CHECK(covariant_force(canonical2("0"), ex("2", 2), x) == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(covariant_force(test::heisenberg("0"), ex("x1", 3), std::vector<double>{0, 0, 0}),
                  StructureError);
}

TEST_CASE("reciprocal tensor is antisymmetric") {
  const auto M = PoissonWManifold::canonical(2, ex("0.1*q1*p2", 4));
  const auto H = ex("0.5*(p1^2+p2^2) + 0.5*(q1^2+q2^2) + 0.1*q1^2*q2", 4);
  const auto rt = reciprocal_tensor(M, H, std::vector<double>{0.3, -0.2, 0.5, 0.1});
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(rt.f(k, j) + rt.f(j, k)) <= 1e-12);
}

TEST_CASE("divergence identity") {
  const std::vector<double> x{0.6, -0.4};
  const auto flat = divergence_identity(canonical2("0"), ex("q1^2*p1 + p1^3", 2), x);
  CHECK(flat.lhs == doctest::Approx(flat.rhs_derived));
  CHECK(flat.lhs == doctest::Approx(flat.rhs_claimed));

  // A parallel to DH: A.v = 0 and w = 0, so both right-hand sides agree
  const auto radial = divergence_identity(canonical2("0.1*(q1^2+p1^2)"), kOsc, x);
  CHECK(radial.rhs_claimed == doctest::Approx(radial.rhs_derived));
  CHECK(radial.lhs == doctest::Approx(radial.rhs_derived));

  const auto bent = divergence_identity(test::heisenberg("x2"), ex("x1*x3 + 0.5*x2^2", 3), std::vector<double>{0.3, 0.2, -0.5});
  CHECK(std::abs(bent.lhs - bent.rhs_derived) <= 1e-8);
  CHECK(std::isfinite(bent.rhs_claimed));
}

TEST_CASE("commutator along the flow") {
  const auto flat = flow_commutator_identity(canonical2("q1"), kOsc, std::vector<double>{0.2, 0.3});
  for (const auto& r : flat) {
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
  }
  const auto M = test::heisenberg("x2");
  const auto H = ex("x1*x3 + 0.5*x2^2", 3);
  const std::vector<double> x{0.3, -0.1, 0.4};
  const auto structural = flow_commutator_identity(M, H, x);
  const auto literal = flow_commutator_literal_lhs(M, H, x);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(structural[j].lhs - literal[j]) <= 1e-10);
    CHECK(std::isfinite(structural[j].rhs));
  }
}

TEST_CASE("general operator identity") {
  const auto flat = general_operator_identity(canonical2("q1"), kOsc, ex("q1*p1", 2), std::vector<double>{0.2, 0.3});
  for (const auto& r : flat) {
    CHECK(std::abs(r.lhs) <= 1e-13);
    CHECK(r.rhs == 0.0);
  }
  const auto bent = general_operator_identity(test::heisenberg("x2"), ex("x1*x3", 3), ex("x2*x3", 3),
                                              std::vector<double>{0.3, -0.1, 0.4});
  for (const auto& r : bent) CHECK(std::isfinite(r.lhs - r.rhs));
}
