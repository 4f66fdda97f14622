#include "gchs/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gchs/scenario.hpp"

namespace gchs::cli {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// Routes CSV to --out when given, stdout otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      out_ = &file_;
    }
  }
  bool ok() const { return out_ != &file_ || file_.is_open(); }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

struct Options {
  std::string path;
  std::string out_path;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string convention;
  std::string f, g, at;
};

int load(const Options& o, std::ostream& err, Scenario& sc) {
  try {
    sc = load_scenario(o.path);
    return kOk;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  }
}

std::optional<Convention> convention_flag(const Options& o, std::ostream& err, bool& bad) {
  bad = false;
  if (o.convention.empty()) return std::nullopt;
  auto c = parse_convention(o.convention);
  if (!c) {
    err << "error: unknown convention '" << o.convention << "' (transport, damped-literal, nghs-literal)\n";
    bad = true;
  }
  return c;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  Scenario sc;
  if (int rc = load(o, err, sc)) return rc;
  out << sc.echo();
  return kOk;
}

int cmd_audit(const Options& o, std::ostream& out, std::ostream& err) {
  Scenario sc;
  if (int rc = load(o, err, sc)) return rc;
  if (!sc.audit) {
    err << "error: " << o.path << " has no [audit] section\n";
    return kUsage;
  }
  bool bad = false;
  const auto conv = convention_flag(o, err, bad);
  if (bad) return kUsage;
  const Convention convention =
      conv ? *conv : (sc.simulate ? sc.simulate->convention : Convention::Transport);

  AuditOptions opt;
  opt.box = sc.audit->box;
  opt.samples = sc.audit->samples;
  opt.seed = o.seed ? *o.seed : sc.audit->seed;
  opt.identities = sc.audit->identities;
  opt.threads = o.threads;

  AuditReport report;
  try {
    report = run_audit(sc.audit_context(convention), opt);
  } catch (const std::exception& e) {
    err << "error: audit failed: " << e.what() << "\n";
    return kNumeric;
  }
  report.scenario = sc.name;

  Sink sink(o.out_path, out);
  if (!sink.ok()) {
    err << "error: cannot write " << o.out_path << "\n";
    return kUsage;
  }
  write_audit_csv(report, sink.stream());

  std::size_t failed = 0;
  for (const auto& r : report.results)
    if (r.verdict == "fail") {
      ++failed;
      err << "FORCED identity failed: " << r.id << " max_residual=" << g17(r.max_residual) << "\n";
    }
  err << "audit " << sc.name << ": seed=" << report.seed << " samples=" << report.samples
      << " rejected_points=" << report.rejected_points << " forced_failures=" << failed << "\n";
  if (report.usable_fraction() < 0.5) {
    err << "error: more than half of the sample points were unusable\n";
    return kNumeric;
  }
  return report.forced_failure ? kForcedFailure : kOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  Scenario sc;
  if (int rc = load(o, err, sc)) return rc;
  if (!sc.simulate) {
    err << "error: " << o.path << " has no [simulate] section\n";
    return kUsage;
  }
  bool bad = false;
  const auto conv = convention_flag(o, err, bad);
  if (bad) return kUsage;

  TrajectoryConfig cfg;
  cfg.manifold = sc.manifold.get();
  cfg.H = sc.H;
  cfg.x0 = sc.simulate->x0;
  cfg.t0 = sc.simulate->t0;
  cfg.t1 = sc.simulate->t1;
  cfg.h = sc.simulate->h;
  cfg.method = sc.simulate->method;
  cfg.convention = conv ? *conv : sc.simulate->convention;
  cfg.observables = sc.simulate->observables;

  Trajectory traj;
  try {
    traj = integrate(cfg);
  } catch (const IntegrationError& e) {
    err << "error: integration failed: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::runtime_error& e) {
    err << "error: integration failed: " << e.what() << "\n";
    return kNumeric;
  }

  Sink sink(o.out_path, out);
  if (!sink.ok()) {
    err << "error: cannot write " << o.out_path << "\n";
    return kUsage;
  }
  auto& s = sink.stream();
  s << "t";
  for (int i = 0; i < sc.dim; ++i) s << ",x" << i + 1;
  s << ",w,H,s,I";
  for (const auto& name : sc.simulate->observables_text) s << "," << csv_field(name);
  s << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    s << g17(traj.times[k]);
    for (double v : traj.states[k]) s << "," << g17(v);
    s << "," << g17(traj.w[k]) << "," << g17(traj.H[k]) << "," << g17(traj.s[k]) << "," << g17(traj.I[k]);
    for (const auto& col : traj.observables) s << "," << g17(col[k]);
    s << "\n";
  }
  return kOk;
}

int cmd_bracket(const Options& o, std::ostream& out, std::ostream& err) {
  Scenario sc;
  if (int rc = load(o, err, sc)) return rc;
  ScalarExpr f, g;
  try {
    f = sc.expr(o.f);
    g = sc.expr(o.g);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  }
  std::vector<double> x;
  {
    std::stringstream ss(o.at);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        x.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        err << "error: --at expects comma-separated numbers, got '" << o.at << "'\n";
        return kUsage;
      }
    }
  }
  if (static_cast<int>(x.size()) != sc.dim) {
    err << "error: --at needs " << sc.dim << " coordinates\n";
    return kUsage;
  }
  try {
    const auto parts = gpwb_decomposed(*sc.manifold, f, g, x);
    out << "bracket " << g17(gpwb(*sc.manifold, f, g, x)) << "\n";
    out << "ghs " << g17(parts.ghs) << "\n";
    out << "xchi " << g17(parts.xchi) << "\n";
    out << "w " << g17(w_dynamics(*sc.manifold, sc.H, x)) << "\n";
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}

}  // namespace

void write_audit_csv(const AuditReport& report, std::ostream& out) {
  out << "identity_id,class,samples,rejected,max_residual,mean_residual,sign_note,verdict\n";
  for (const auto& r : report.results) {
    std::string note = r.sign_note;
    if (r.verdict == "skipped") note = "skipped: " + r.skip_reason;
    out << r.id << "," << to_string(r.cls) << "," << r.samples << "," << r.rejected << "," << g17(r.max_residual)
        << "," << g17(r.mean_residual) << "," << csv_field(note) << "," << r.verdict << "\n";
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized covariant Hamilton systems: brackets, flows and identity audits", "gchs"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "validate a scenario and print its normalized form");
  check->add_option("scenario", o.path, "scenario file")->required();

  auto* audit = app.add_subcommand("audit", "sample the identity catalog and write a CSV report");
  audit->add_option("scenario", o.path, "scenario file")->required();
  audit->add_option("--out", o.out_path, "report path (default stdout)");
  audit->add_option("--threads", o.threads, "worker threads (default machine parallelism)")
      ->check(CLI::NonNegativeNumber);
  audit->add_option("--seed", o.seed, "override the scenario seed");
  audit->add_option("--convention", o.convention, "flow convention for the configured-convention row");

  auto* simulate = app.add_subcommand("simulate", "integrate the covariant flow and write a CSV trajectory");
  simulate->add_option("scenario", o.path, "scenario file")->required();
  simulate->add_option("--out", o.out_path, "trajectory path (default stdout)");
  simulate->add_option("--convention", o.convention, "transport | damped-literal | nghs-literal");

  auto* bracket = app.add_subcommand("bracket", "evaluate {f,g}, its parts and w at a point");
  bracket->add_option("scenario", o.path, "scenario file")->required();
  bracket->add_option("--f", o.f, "first function")->required();
  bracket->add_option("--g", o.g, "second function")->required();
  bracket->add_option("--at", o.at, "point, comma separated")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  {
    std::ifstream probe(o.path);
    if (!probe) {
      err << "error: cannot read " << o.path << "\n";
      return kUsage;
    }
  }

  if (check->parsed()) return cmd_check(o, out, err);
  if (audit->parsed()) return cmd_audit(o, out, err);
  if (simulate->parsed()) return cmd_simulate(o, out, err);
  return cmd_bracket(o, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("gchs");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gchs::cli
