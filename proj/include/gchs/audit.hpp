#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gchs/dynamics.hpp"
#include "gchs/frame_algebra.hpp"
#include "gchs/poisson_w.hpp"

namespace gchs {

/// FORCED identities hold algebraically under the adopted conventions and carry a pass
/// tolerance; REPORTED identities are measured and published without assertion.
enum class IdentityClass { Forced, Reported };

std::string to_string(IdentityClass c);

inline constexpr double kForcedTolerance = 1e-8;

/// Everything an identity evaluator may read. Immutable during a run.
struct AuditContext {
  const PoissonWManifold* manifold = nullptr;
  ScalarExpr H;
  std::vector<ScalarExpr> pool;             // test functions f, g, h, K
  std::optional<std::vector<double>> v;     // curvature contraction velocity; NGHS velocity at the point when absent
  Convention convention = Convention::Transport;
};

/// Residual at one point. Sign-sensitive identities fill `plus` (the stated sign) and
/// `minus` (the opposite global sign); others fill `residual` only.
struct PointOutcome {
  double residual = 0.0;
  double plus = 0.0;
  double minus = 0.0;
};

struct IdentitySpec {
  std::string id;
  std::string description;
  IdentityClass cls = IdentityClass::Reported;
  bool sign_sensitive = false;
  /// Returns a reason when the scenario lacks a required structure.
  std::function<std::optional<std::string>(const AuditContext&)> skip_reason;
  /// Evaluates at x; `index` selects the test functions deterministically.
  std::function<PointOutcome(const AuditContext&, std::span<const double> x, std::size_t index)> evaluate;
};

const std::vector<IdentitySpec>& identity_catalog();

struct IdentityResult {
  std::string id;
  std::string description;
  IdentityClass cls = IdentityClass::Reported;
  std::size_t samples = 0;
  std::size_t rejected = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::string sign_note;
  std::string verdict;  // pass | fail | reported | skipped
  std::string skip_reason;

  // Sign bookkeeping (sign-sensitive identities only).
  bool sign_sensitive = false;
  int matched_sign = 0;  // +1 stated sign, -1 opposite, 0 undetermined
  std::size_t plus_only = 0, minus_only = 0, both = 0, neither = 0;
};

struct AuditOptions {
  std::vector<std::pair<double, double>> box;  // one interval per axis
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  std::vector<std::string> identities;  // empty = all
  int threads = 0;                      // 0 = OpenMP default
};

struct AuditReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t rejected_points = 0;
  std::vector<IdentityResult> results;
  bool forced_failure = false;

  const IdentityResult* find(std::string_view id) const;
  double usable_fraction() const {
    return samples == 0 ? 0.0 : 1.0 - static_cast<double>(rejected_points) / static_cast<double>(samples);
  }
};

/// splitmix64; fixed so audits reproduce across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

std::vector<std::vector<double>> sample_points(std::span<const std::pair<double, double>> box, std::size_t count,
                                               std::uint64_t seed);

/// Sample points evaluated concurrently (OpenMP); merge is ordered, so output matches the serial run.
AuditReport run_audit(const AuditContext& ctx, const AuditOptions& options);
/// Single-threaded reference implementation.
AuditReport run_audit_serial(const AuditContext& ctx, const AuditOptions& options);

/// Cyclic sum {f,{g,h}} + {g,{h,f}} + {h,{f,g}} with every bracket the generalized one.
template <class F, class G, class Hh>
double jacobi_sum(const PoissonWManifold& M, const F& f, const G& g, const Hh& h, std::span<const double> x,
                  double* scale = nullptr) {
  auto bracket = [&M](const auto& a, const auto& b) {
    return [&M, &a, &b]<class U>(std::span<const U> y) { return gpwb(M.at(y), a, b, y); };
  };
  const auto geom = M.at(x);
  const double t1 = gpwb(geom, f, bracket(g, h), x);
  const double t2 = gpwb(geom, g, bracket(h, f), x);
  const double t3 = gpwb(geom, h, bracket(f, g), x);
  if (scale) *scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  return t1 + t2 + t3;
}

double jacobi_residual(const PoissonWManifold& M, const ScalarExpr& f, const ScalarExpr& g, const ScalarExpr& h,
                       std::span<const double> x);

}  // namespace gchs
