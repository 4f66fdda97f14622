#include "gchs/audit.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace gchs {

std::string to_string(IdentityClass c) { return c == IdentityClass::Forced ? "FORCED" : "REPORTED"; }

const IdentityResult* AuditReport::find(std::string_view id) const {
  for (const auto& r : results)
    if (r.id == id) return &r;
  return nullptr;
}

double jacobi_residual(const PoissonWManifold& M, const ScalarExpr& f, const ScalarExpr& g, const ScalarExpr& h,
                       std::span<const double> x) {
  return std::abs(jacobi_sum(M, f, g, h, x));
}

std::vector<std::vector<double>> sample_points(std::span<const std::pair<double, double>> box, std::size_t count,
                                               std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> points(count, std::vector<double>(box.size()));
  for (auto& p : points)
    for (std::size_t a = 0; a < box.size(); ++a) p[a] = box[a].first + (box[a].second - box[a].first) * rng.uniform();
  return points;
}

namespace {

using Span = std::span<const double>;

const ScalarExpr& pick(const AuditContext& ctx, std::size_t index, std::size_t offset) {
  return ctx.pool[(index + offset) % ctx.pool.size()];
}

std::vector<double> contraction_velocity(const AuditContext& ctx, Span x) {
  if (ctx.v) return *ctx.v;
  return nghs_velocity(ctx.manifold->at(x), ctx.H, x);
}

std::optional<std::string> always(const AuditContext&) { return std::nullopt; }

std::optional<std::string> needs_phase_split(const AuditContext& ctx) {
  if (!ctx.manifold->phase_split()) return "needs an even-dimensional phase space";
  return std::nullopt;
}

std::optional<std::string> needs_canonical(const AuditContext& ctx) {
  if (!ctx.manifold->phase_split()) return "needs an even-dimensional phase space";
  if (!ctx.manifold->canonical_structure()) return "pairing defined for the canonical structure only";
  if (ctx.manifold->has_frame()) return "pairing defined in the coordinate frame only";
  return std::nullopt;
}

PointOutcome single(double r) {
  PointOutcome o;
  o.residual = r;
  return o;
}

PointOutcome signed_outcome(double plus, double minus) {
  PointOutcome o;
  o.plus = plus;
  o.minus = minus;
  o.residual = std::min(plus, minus);
  return o;
}

double max_matrix_residual(const Matrix<double>& a, const Matrix<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) worst = std::max(worst, normalized_residual(a.data[i], b.data[i]));
  return worst;
}

std::vector<IdentitySpec> build_catalog() {
  std::vector<IdentitySpec> c;
  auto add = [&](std::string id, std::string description, IdentityClass cls, bool sign_sensitive,
                 std::function<std::optional<std::string>(const AuditContext&)> skip,
                 std::function<PointOutcome(const AuditContext&, Span, std::size_t)> eval) {
    c.push_back({std::move(id), std::move(description), cls, sign_sensitive, std::move(skip), std::move(eval)});
  };
  constexpr auto Forced = IdentityClass::Forced;
  constexpr auto Reported = IdentityClass::Reported;

  add("I01-gpwb-antisymmetry", "{f,g} = -{g,f}", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto geom = ctx.manifold->at(x);
        double worst = 0.0;
        for (std::size_t k = 1; k <= 3; ++k) {
          const auto& f = pick(ctx, p, 0);
          const auto& g = pick(ctx, p, k);
          worst = std::max(worst, normalized_residual(gpwb(geom, f, g, x), -gpwb(geom, g, f, x)));
        }
        return single(worst);
      });

  add("I02-gpwb-bilinearity", "{a f + b g, h} = a{f,h} + b{g,h}", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        const double a = 0.5 + 0.25 * static_cast<double>(p % 7);
        const double b = -1.25 + 0.5 * static_cast<double>(p % 5);
        const auto& f = pick(ctx, p, 0);
        const auto& g = pick(ctx, p, 1);
        const auto& h = pick(ctx, p, 2);
        auto combo = [&]<class U>(std::span<const U> y) { return U(a) * f(y) + U(b) * g(y); };
        const auto geom = ctx.manifold->at(x);
        return single(normalized_residual(gpwb(geom, combo, h, x), a * gpwb(geom, f, h, x) + b * gpwb(geom, g, h, x)));
      });

  add("I03-gpwb-jacobi", "{f,{g,h}} + {g,{h,f}} + {h,{f,g}} = 0", Reported, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        double scale = 0.0;
        const double sum = jacobi_sum(*ctx.manifold, pick(ctx, p, 0), pick(ctx, p, 1), pick(ctx, p, 2), x, &scale);
        return single(std::abs(sum) / (1.0 + scale));
      });

  add("I04-gpwb-decomposition",
      "{f,g} = {f,g}_GHS + X_chi(f,g); also covers the non-degeneracy reading {f,g}=0 => {f,g}_GHS = X_chi(g,f)",
      Forced, false, always, [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto geom = ctx.manifold->at(x);
        double worst = 0.0;
        for (std::size_t k = 1; k <= 2; ++k) {
          const auto& f = pick(ctx, p, 0);
          const auto& g = pick(ctx, p, k);
          const auto parts = gpwb_decomposed(geom, f, g, x);
          worst = std::max(worst, normalized_residual(gpwb(geom, f, g, x), parts.ghs + parts.xchi));
        }
        return single(worst);
      });

  add("I05-gpwb-leibniz", "{fg,h} = {fg,h}_GHS + X_chi(fg,h)", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto& f = pick(ctx, p, 0);
        const auto& g = pick(ctx, p, 1);
        const auto& h = pick(ctx, p, 2);
        auto product = [&]<class U>(std::span<const U> y) { return f(y) * g(y); };
        const auto geom = ctx.manifold->at(x);
        const auto parts = gpwb_decomposed(geom, product, h, x);
        return single(normalized_residual(gpwb(geom, product, h, x), parts.ghs + parts.xchi));
      });

  add("I06-xm-bracket-expansion",
      "[X_f^M,X_g^M]K = ([X_f,X_g] + f[X_chi,X_g] + g[X_f,X_chi] + (2X_f g + X_chi(f,g))X_chi)K", Forced, false,
      always, [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto r = bracket_XM_expansion(*ctx.manifold, pick(ctx, p, 0), pick(ctx, p, 1), pick(ctx, p, 3), x);
        return single(normalized_residual(r.lhs, r.rhs));
      });

  add("I07-xm-bracket-hamiltonian",
      "[X_f^M,X_g^M]H - [X_f,X_g]H = 2w X_f g + (w X_chi + X_w + X_chi X_H)(f,g)", Reported, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto r = hamiltonian_specialization(*ctx.manifold, pick(ctx, p, 0), pick(ctx, p, 1), ctx.H, x);
        return single(normalized_residual(r.lhs, r.rhs));
      });

  add("I08-energy-pairing", "{H,H} = 0", Forced, false, always, [](const AuditContext& ctx, Span x, std::size_t) {
    return single(normalized_residual(gpwb(ctx.manifold->at(x), ctx.H, ctx.H, x), 0.0));
  });

  add("I09-w-dynamics-forms", "{H,1} = X_H chi", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        const auto geom = ctx.manifold->at(x);
        return single(normalized_residual(w_dynamics(geom, ctx.H, x), w_from_hamiltonian_field(geom, ctx.H, x)));
      });

  add("I10-curvature-commutator", "[D_i,D_j] g = c_ij^k D_k g", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto sf = structure_functions(*ctx.manifold, x);
        double worst = 0.0;
        for (const ScalarExpr* g : {&pick(ctx, p, 0), &ctx.H})
          worst = std::max(worst, max_matrix_residual(covariant_commutator(*ctx.manifold, *g, x),
                                                      structural_commutator(*ctx.manifold, sf, *g, x)));
        return single(worst);
      });

  add("I11-curvature-velocity", "v^j [D_i,D_j] g = w_i^k D_k g", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto& M = *ctx.manifold;
        const auto v = contraction_velocity(ctx, x);
        const auto& g = pick(ctx, p, 1);
        const auto sf = structure_functions(M, x);
        const auto comm = covariant_commutator(M, g, x);
        const auto Dg = covariant_D(M.at(x), g, x);
        double worst = 0.0;
        for (int i = 0; i < M.dim(); ++i) {
          double lhs = 0.0;
          for (int j = 0; j < M.dim(); ++j) lhs += v[j] * comm(i, j);
          const auto w = curvature_velocity_coefficients(sf, v, i);
          double rhs = 0.0;
          for (int k = 0; k < M.dim(); ++k) rhs += w[k] * Dg[k];
          worst = std::max(worst, normalized_residual(lhs, rhs));
        }
        return single(worst);
      });

  add("I12-structure-antisymmetry", "c_ij^k + c_ji^k = 0", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        return single(structure_antisymmetry_residual(structure_functions(*ctx.manifold, x)));
      });

  add("I13-structure-jacobi", "c_ij^r c_rk^s + c_jk^r c_ri^s + c_ki^r c_rj^s = 0", Reported, false, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        return single(structure_jacobi_residual(*ctx.manifold, x));
      });

  add("I14-force-curl-sign", "u_kj = D_j F_k - D_k F_j = c_kj^i F_i (stated sign +)", Forced, true, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        const auto r = force_curl_sign_check(*ctx.manifold, ctx.H, x);
        return signed_outcome(r.plus, r.minus);
      });

  add("I15-reciprocal-force", "(u_ji; t_i) = (F_ij; q_i) H (stated sign +)", Reported, true, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        const auto v = contraction_velocity(ctx, x);
        const auto r = reciprocal_force_check(*ctx.manifold, v, ctx.H, x);
        return signed_outcome(std::max(r.u.plus, r.t), std::max(r.u.minus, r.t));
      });

  add("I16-divergence-derived", "sum_k D_k(Dx_k/dt) = sum_k E_k v_k + A.v + x.Dw + w tr(e)", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        const auto r = divergence_identity(*ctx.manifold, ctx.H, x);
        return single(normalized_residual(r.lhs, r.rhs_derived));
      });

  add("I17-divergence-claimed", "sum_k D_k(Dx_k/dt) = div v + (x.D + 2) w", Reported, false, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        const auto r = divergence_identity(*ctx.manifold, ctx.H, x);
        return single(normalized_residual(r.lhs, r.rhs_claimed));
      });

  add("I18-commutator-flow", "[D_i,D_j] Dx^i/dt = c_ij^i (div v + w) + theta_j^k D_k w + w_j^i A_i", Reported, false,
      always, [](const AuditContext& ctx, Span x, std::size_t) {
        double worst = 0.0;
        for (const auto& r : flow_commutator_identity(*ctx.manifold, ctx.H, x))
          worst = std::max(worst, normalized_residual(r.lhs, r.rhs));
        return single(worst);
      });

  add("I19-general-operator", "[D_i,D_j] (D/dt f) = F_ij {H,f} + w c_ij^k d_k f", Reported, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        double worst = 0.0;
        for (const auto& r : general_operator_identity(*ctx.manifold, ctx.H, pick(ctx, p, 2), x))
          worst = std::max(worst, normalized_residual(r.lhs, r.rhs));
        return single(worst);
      });

  add("I20-reciprocal-tensor-antisymmetry", "f_kj = -f_jk", Forced, false, needs_phase_split,
      [](const AuditContext& ctx, Span x, std::size_t) {
        const auto rt = reciprocal_tensor(*ctx.manifold, ctx.H, x);
        double worst = 0.0;
        const int n = ctx.manifold->dim();
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j) worst = std::max(worst, normalized_residual(rt.f(k, j), -rt.f(j, k)));
        return single(worst);
      });

  add("I21-reciprocal-tensor-offdiagonal", "f_kj = u_jk + (L_kj + L_kj chi) w for j != k", Reported, false,
      needs_phase_split, [](const AuditContext& ctx, Span x, std::size_t) {
        const auto rt = reciprocal_tensor(*ctx.manifold, ctx.H, x);
        double worst = 0.0;
        const int n = ctx.manifold->dim();
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j)
            if (j != k) worst = std::max(worst, normalized_residual(rt.f(k, j), rt.claimed(k, j)));
        return single(worst);
      });

  add("I22-symplectic-pairing", "{H,f} = Omega(X_H^M, X_f^M) (stated sign +)", Forced, true, needs_canonical,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto& M = *ctx.manifold;
        const auto geom = M.at(x);
        const auto XH = vec_XM(geom, ctx.H, x);
        double plus = 0.0, minus = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
          const auto& f = pick(ctx, p, k);
          const double omega = omega_pair(M, XH, vec_XM(geom, f, x));
          const double bracket = gpwb(geom, ctx.H, f, x);
          plus = std::max(plus, normalized_residual(omega, bracket));
          minus = std::max(minus, normalized_residual(omega, -bracket));
        }
        return signed_outcome(plus, minus);
      });

  add("I23-covariant-evolution", "df/dt + w f = {H,f} along the transport flow", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        const auto geom = ctx.manifold->at(x);
        const auto v = flow_rhs(geom, ctx.H, Convention::Transport, x);
        const double w = w_dynamics(geom, ctx.H, x);
        double worst = 0.0;
        for (const auto& f : ctx.pool) {
          double fv = 0.0;
          const auto df = gradient(f, x, &fv);
          worst = std::max(worst, normalized_residual(apply_field(df, v) + w * fv, gpwb(geom, ctx.H, f, x)));
        }
        return single(worst);
      });

  add("I24-second-order-operator",
      "f'' + 2w f' + (w^2 + w') f = d/dt{H,f} + w{H,f}; f = x_i gives the acceleration flow", Forced, false, always,
      [](const AuditContext& ctx, Span x, std::size_t p) {
        const auto& M = *ctx.manifold;
        auto r = second_order_at(M, ctx.H, pick(ctx, p, 0), x);
        double worst = normalized_residual(r.lhs, r.rhs);
        const int i = static_cast<int>(p % static_cast<std::size_t>(M.dim()));
        auto coord = ScalarExpr::variable(i, M.dim());
        r = second_order_at(M, ctx.H, coord, x);
        worst = std::max(worst, normalized_residual(r.lhs, r.rhs));
        return single(worst);
      });

  add("I25-nghs-velocity", "Dx/dt = J DH (stated sign +), Dx_i/dt read as {H,x_i}", Reported, true, always,
      [](const AuditContext& ctx, Span x, std::size_t) {
        const auto geom = ctx.manifold->at(x);
        const auto transport = flow_rhs(geom, ctx.H, Convention::Transport, x);
        const auto literal = nghs_velocity(geom, ctx.H, x);
        const double w = w_dynamics(geom, ctx.H, x);
        double plus = 0.0, minus = 0.0;
        for (int i = 0; i < geom.n; ++i) {
          const double covariant = transport[i] + w * x[i];
          plus = std::max(plus, normalized_residual(covariant, literal[i]));
          minus = std::max(minus, normalized_residual(covariant, -literal[i]));
        }
        return signed_outcome(plus, minus);
      });

  add("I26-evolution-convention", "df/dt + w f = {H,f} along the configured flow convention", Reported, false,
      always, [](const AuditContext& ctx, Span x, std::size_t) {
        const auto geom = ctx.manifold->at(x);
        const auto v = flow_rhs(geom, ctx.H, ctx.convention, x);
        const double w = w_dynamics(geom, ctx.H, x);
        double worst = 0.0;
        for (const auto& f : ctx.pool) {
          double fv = 0.0;
          const auto df = gradient(f, x, &fv);
          worst = std::max(worst, normalized_residual(apply_field(df, v) + w * fv, gpwb(geom, ctx.H, f, x)));
        }
        return single(worst);
      });

  return c;
}

struct Slot {
  bool ok = false;
  PointOutcome outcome;
};

struct Plan {
  std::vector<const IdentitySpec*> active;
  std::vector<IdentityResult> results;  // parallel to catalog selection, includes skipped
  std::vector<int> slot_of;             // result index -> active index or -1
};

Plan make_plan(const AuditContext& ctx, const AuditOptions& opt) {
  Plan plan;
  const auto& catalog = identity_catalog();
  for (const auto& want : opt.identities) {
    bool found = false;
    for (const auto& spec : catalog) found = found || spec.id == want;
    if (!found) throw std::invalid_argument("unknown identity '" + want + "'");
  }
  for (const auto& spec : catalog) {
    if (!opt.identities.empty() &&
        std::find(opt.identities.begin(), opt.identities.end(), spec.id) == opt.identities.end())
      continue;
    IdentityResult r;
    r.id = spec.id;
    r.description = spec.description;
    r.cls = spec.cls;
    r.sign_sensitive = spec.sign_sensitive;
    if (auto reason = spec.skip_reason(ctx)) {
      r.verdict = "skipped";
      r.skip_reason = *reason;
      plan.slot_of.push_back(-1);
    } else {
      plan.slot_of.push_back(static_cast<int>(plan.active.size()));
      plan.active.push_back(&spec);
    }
    plan.results.push_back(std::move(r));
  }
  return plan;
}

// Returns false when the point itself is unusable (frame or numeric domain).
bool evaluate_point(const AuditContext& ctx, const Plan& plan, std::span<const double> x, std::size_t index,
                    Slot* slots) {
  try {
    ctx.manifold->require_valid_frame(x);
    const auto geom = ctx.manifold->at(x);
    (void)ctx.H(x);
    (void)w_dynamics(geom, ctx.H, x);
  } catch (const std::runtime_error&) {
    return false;
  }
  for (std::size_t k = 0; k < plan.active.size(); ++k) {
    try {
      slots[k].outcome = plan.active[k]->evaluate(ctx, x, index);
      slots[k].ok = std::isfinite(slots[k].outcome.residual);
    } catch (const NumericDomainError&) {
      slots[k].ok = false;
    } catch (const FrameError&) {
      slots[k].ok = false;
    }
  }
  return true;
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void summarize_sign(IdentityResult& r, const std::vector<const PointOutcome*>& outcomes) {
  double max_plus = 0.0, max_minus = 0.0, sum_plus = 0.0, sum_minus = 0.0;
  for (const auto* o : outcomes) {
    const bool p = o->plus <= kForcedTolerance;
    const bool m = o->minus <= kForcedTolerance;
    if (p && m) ++r.both;
    else if (p) ++r.plus_only;
    else if (m) ++r.minus_only;
    else ++r.neither;
    max_plus = std::max(max_plus, o->plus);
    max_minus = std::max(max_minus, o->minus);
    sum_plus += o->plus;
    sum_minus += o->minus;
  }
  const double count = outcomes.empty() ? 1.0 : static_cast<double>(outcomes.size());
  const bool use_plus = max_plus <= max_minus;
  r.max_residual = use_plus ? max_plus : max_minus;
  r.mean_residual = (use_plus ? sum_plus : sum_minus) / count;
  if (r.plus_only > 0 && r.minus_only == 0)
    r.matched_sign = +1;
  else if (r.minus_only > 0 && r.plus_only == 0)
    r.matched_sign = -1;
  else
    r.matched_sign = 0;

  std::string name = r.matched_sign > 0 ? "stated sign (+)" : r.matched_sign < 0 ? "opposite sign (-)" : "undetermined";
  if (r.plus_only > 0 && r.minus_only > 0) name = "inconsistent";
  r.sign_note = "matches " + name + "; plus-only=" + std::to_string(r.plus_only) +
                " minus-only=" + std::to_string(r.minus_only) + " both=" + std::to_string(r.both) +
                " neither=" + std::to_string(r.neither) + "; stated-sign max=" + format_g(max_plus) +
                " opposite-sign max=" + format_g(max_minus);
}

AuditReport assemble(const AuditOptions& opt, Plan plan, const std::vector<char>& usable,
                     const std::vector<Slot>& slots) {
  AuditReport report;
  report.seed = opt.seed;
  report.samples = opt.samples;
  const std::size_t width = plan.active.size();
  for (char u : usable)
    if (!u) ++report.rejected_points;

  for (std::size_t r = 0; r < plan.results.size(); ++r) {
    IdentityResult& res = plan.results[r];
    const int slot = plan.slot_of[r];
    if (slot < 0) {
      report.results.push_back(std::move(res));
      continue;
    }
    std::vector<const PointOutcome*> outcomes;
    double sum = 0.0;
    for (std::size_t p = 0; p < usable.size(); ++p) {
      if (!usable[p]) {
        ++res.rejected;
        continue;
      }
      const Slot& s = slots[p * width + static_cast<std::size_t>(slot)];
      if (!s.ok) {
        ++res.rejected;
        continue;
      }
      outcomes.push_back(&s.outcome);
      res.max_residual = std::max(res.max_residual, s.outcome.residual);
      sum += s.outcome.residual;
    }
    res.samples = outcomes.size();
    res.mean_residual = outcomes.empty() ? 0.0 : sum / static_cast<double>(outcomes.size());

    bool pass = res.samples > 0;
    if (res.sign_sensitive) {
      summarize_sign(res, outcomes);
      pass = pass && res.neither == 0 && !(res.plus_only > 0 && res.minus_only > 0);
    } else {
      pass = pass && res.max_residual <= kForcedTolerance;
    }
    if (res.cls == IdentityClass::Forced) {
      res.verdict = pass ? "pass" : "fail";
      if (!pass) report.forced_failure = true;
    } else {
      res.verdict = "reported";
    }
    report.results.push_back(std::move(res));
  }
  return report;
}

AuditReport run(const AuditContext& ctx, const AuditOptions& opt, bool parallel) {
  if (!ctx.manifold) throw std::invalid_argument("audit context has no manifold");
  if (opt.samples < 1) throw std::invalid_argument("audit needs at least one sample");
  if (static_cast<int>(opt.box.size()) != ctx.manifold->dim())
    throw std::invalid_argument("sampling box needs one interval per coordinate");
  if (ctx.pool.empty()) throw std::invalid_argument("audit needs a non-empty test-function pool");

  Plan plan = make_plan(ctx, opt);
  const auto points = sample_points(opt.box, opt.samples, opt.seed);
  const std::size_t width = plan.active.size();
  std::vector<Slot> slots(points.size() * width);
  std::vector<char> usable(points.size(), 0);
  const auto count = static_cast<long>(points.size());

  if (parallel) {
    const int threads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long p = 0; p < count; ++p)
      usable[p] = evaluate_point(ctx, plan, points[p], static_cast<std::size_t>(p), slots.data() + p * width);
  } else {
    for (long p = 0; p < count; ++p)
      usable[p] = evaluate_point(ctx, plan, points[p], static_cast<std::size_t>(p), slots.data() + p * width);
  }
  return assemble(opt, std::move(plan), usable, slots);
}

}  // namespace

const std::vector<IdentitySpec>& identity_catalog() {
  static const std::vector<IdentitySpec> catalog = build_catalog();
  return catalog;
}

AuditReport run_audit(const AuditContext& ctx, const AuditOptions& options) { return run(ctx, options, true); }

AuditReport run_audit_serial(const AuditContext& ctx, const AuditOptions& options) {
  return run(ctx, options, false);
}

}  // namespace gchs
