#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gchs/audit.hpp"
#include "gchs/dynamics.hpp"
#include "gchs/manifold.hpp"

namespace gchs {

/// Scenario file problem with a 1-based line/column (column 0 when the whole file is at fault).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& source, int line, int column, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct AuditSection {
  std::vector<std::pair<double, double>> box;
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  std::vector<std::string> identities;  // empty = all
  std::vector<std::string> pool_text;
  std::vector<ScalarExpr> pool;
};

struct SimulateSection {
  std::vector<double> x0;
  double t0 = 0.0;
  double t1 = 1.0;
  double h = 1e-3;
  Method method = Method::RK4;
  Convention convention = Convention::Transport;
  std::vector<std::string> observables_text;
  std::vector<ScalarExpr> observables;
  std::optional<std::vector<double>> v;
};

struct Scenario {
  std::string name;
  int dim = 0;
  std::vector<std::string> coords;
  std::string chi_text = "0";
  bool canonical = false;
  Matrix<std::string> J_text;                 // filled for explicit J
  std::vector<std::string> A_override_text;   // fault injection only
  std::vector<std::vector<std::string>> frame_text;
  std::string H_text;
  ScalarExpr H;
  std::optional<AuditSection> audit;
  std::optional<SimulateSection> simulate;

  std::shared_ptr<const PoissonWManifold> manifold;

  /// Parses an expression in this scenario's coordinates.
  ScalarExpr expr(const std::string& text) const;
  /// Canonical re-serialization (parseable by parse_scenario).
  std::string echo() const;
  AuditContext audit_context(Convention convention) const;
};

/// Parses and validates. Throws ScenarioError on any problem.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

/// The pool used when a scenario does not list one (6 polynomials, 2 transcendental).
std::vector<std::string> default_pool(const std::vector<std::string>& coords);

}  // namespace gchs
