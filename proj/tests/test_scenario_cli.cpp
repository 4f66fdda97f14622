#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gchs/cli.hpp"
#include "gchs/scenario.hpp"

using namespace gchs;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = GCHS_SCENARIO_DIR;
const std::string kFixtures = GCHS_FIXTURE_DIR;

struct Run {
  int code = 0;
  std::string out, err;
};

Run gchs_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / ("gchs-test-" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

const char* kMinimal = R"ini(
[manifold]
dim = 2
chi = "q1"
J = canonical
[hamiltonian]
H = "0.5*(q1^2 + p1^2)"
)ini";

}  // namespace

TEST_CASE("bundled scenarios parse and echo stably") {
  for (const char* name : {"abelian", "chi-q", "heisenberg", "phase4"}) {
    const auto sc = load_scenario(kScenarios + "/" + name + ".ini");
    CHECK(sc.name == name);
    REQUIRE(sc.audit);
    CHECK(sc.audit->pool.size() == 8);
    CHECK(sc.audit->samples >= 500);
    const auto echo = sc.echo();
    const auto again = parse_scenario(echo, std::string(name) + ".ini");
    CHECK(again.echo() == echo);
  }
}

TEST_CASE("explicit structure matrix entries") {
  const auto sc = load_scenario(kScenarios + "/heisenberg.ini");
  CHECK(!sc.canonical);
  CHECK(sc.manifold->has_frame());
  const std::vector<double> x{0.5, 0.1, 0.2};
  CHECK(sc.manifold->J()(2, 1)(std::span<const double>(x)) == -0.5);
  CHECK(sc.manifold->J()(1, 0)(std::span<const double>(x)) == -1.0);
}

TEST_CASE("scenario errors carry line and column") {
  try {
    load_scenario(kFixtures + "/bad-J.ini");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("J12 != -J21") != std::string::npos);
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(load_scenario(kFixtures + "/missing-H.ini"), ScenarioError);

  const std::string bad_expr = "[manifold]\ndim = 2\nchi = \"q1 + foo\"\nJ = canonical\n[hamiltonian]\nH = \"q1\"\n";
  try {
    parse_scenario(bad_expr);
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 13);
  }
  CHECK_THROWS_AS(parse_scenario("[manifold]\ndim = 3\nJ = canonical\n[hamiltonian]\nH = \"x1\"\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[extra]\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[audit]\nsamples = 0\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[audit]\nidentities = I77-missing\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[simulate]\nx0 = 1\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[simulate]\nx0 = 1, 0\nmethod = euler\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[manifold]\ndim = 2\nchi = \"q1\nJ = canonical\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("[manifold]\ndim = 2\nJ = canonical\n[frame]\nE1 = \"1\", \"0\"\n[hamiltonian]\nH = \"q1\"\n"),
                  ScenarioError);
}

TEST_CASE("mirror entries of J are filled in") {
  const auto sc = parse_scenario("[manifold]\ndim = 2\nJ12 = \"1 + q1^2\"\n[hamiltonian]\nH = \"q1\"\n");
  const std::vector<double> x{2, 0};
  CHECK(sc.manifold->J()(1, 0)(std::span<const double>(x)) == -5.0);
  CHECK(sc.chi_text == "0");
  CHECK(sc.audit_context(Convention::Transport).pool.size() == 8);
}

TEST_CASE("check command") {
  auto r = gchs_run({"check", kScenarios + "/chi-q.ini"});
  CHECK(r.code == 0);
  CHECK(r.out.find("[manifold]") != std::string::npos);
  r = gchs_run({"check", kFixtures + "/bad-J.ini"});
  CHECK(r.code == 2);
  CHECK(r.err.find("J12 != -J21") != std::string::npos);
  CHECK(gchs_run({"check", kFixtures + "/missing-H.ini"}).code == 2);
  CHECK(gchs_run({"check", kFixtures + "/no-such-file.ini"}).code == 1);
  CHECK(gchs_run({}).code == 1);
  CHECK(gchs_run({"frobnicate"}).code == 1);
  CHECK(gchs_run({"--help"}).code == 0);
}

TEST_CASE("audit command") {
  const auto out = (fs::temp_directory_path() / "gchs-test-report.csv").string();
  auto r = gchs_run({"audit", kScenarios + "/abelian.ini", "--out", out, "--threads", "2"});
  CHECK(r.code == 0);
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "identity_id,class,samples,rejected,max_residual,mean_residual,sign_note,verdict");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto verdict = line.substr(line.rfind(',') + 1);
    if (line.find(",FORCED,") != std::string::npos) CHECK(verdict == "pass");
    else CHECK(verdict == "reported");
  }
  CHECK(rows == 26);

  r = gchs_run({"audit", kFixtures + "/corrupt-A.ini"});
  CHECK(r.code == 4);
  CHECK(r.err.find("I10-curvature-commutator") != std::string::npos);

  // seed flag changes the sample, not the verdicts
  const auto a = gchs_run({"audit", kScenarios + "/chi-q.ini", "--seed", "77"});
  const auto b = gchs_run({"audit", kScenarios + "/chi-q.ini", "--seed", "77", "--threads", "1"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != gchs_run({"audit", kScenarios + "/chi-q.ini"}).out);
  CHECK(gchs_run({"audit", kScenarios + "/chi-q.ini", "--convention", "sideways"}).code == 1);
  const auto nghs = gchs_run({"audit", kScenarios + "/chi-q.ini", "--convention", "nghs-literal"});
  CHECK(nghs.code == 0);

  const auto unusable = temp_file("unusable.ini", std::string(kMinimal).replace(std::string(kMinimal).find("0.5*(q1^2 + p1^2)"), 17, "log(q1)") +
                                                      "[audit]\nbox = -1:0.2, -1:1\nsamples = 50\n");
  CHECK(gchs_run({"audit", unusable}).code == 3);
  CHECK(gchs_run({"audit", temp_file("noaudit.ini", kMinimal)}).code == 1);
}

TEST_CASE("simulate command") {
  auto r = gchs_run({"simulate", kScenarios + "/abelian.ini"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x1,x2,w,H,s,I,q1^2 + p1^2");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto cols = split(line);
    REQUIRE(cols.size() == 8);
    const double t = std::stod(cols[0]);
    CHECK(std::abs(std::stod(cols[1]) - std::cos(t)) <= 1e-6);
    ++rows;
  }
  CHECK(rows == 1001);

  const auto constant = temp_file("constant.ini", "[manifold]\ndim = 2\nJ = canonical\n[hamiltonian]\nH = \"2\"\n"
                                                  "[simulate]\nx0 = 0.25, -0.5\nt1 = 1\nh = 0.25\n");
  r = gchs_run({"simulate", constant});
  REQUIRE(r.code == 0);
  std::istringstream rows_in(r.out);
  std::getline(rows_in, line);
  while (std::getline(rows_in, line)) {
    const auto cols = split(line);
    CHECK(cols[1] == "0.25");
    CHECK(cols[2] == "-0.5");
  }

  const auto leaving = temp_file("leaving.ini", "[manifold]\ndim = 2\nJ = canonical\n[hamiltonian]\nH = \"0.5*p1^2 + log(q1)\"\n"
                                                "[simulate]\nx0 = 0.5, 1\nt1 = 5\nh = 0.01\n");
  r = gchs_run({"simulate", leaving});
  CHECK(r.code == 3);
  CHECK(r.err.find("last good t") != std::string::npos);
  CHECK(gchs_run({"simulate", kScenarios + "/heisenberg.ini", "--out",
                  (fs::temp_directory_path() / "gchs-test-traj.csv").string()})
            .code == 0);
}

TEST_CASE("bracket command") {
  const auto flat = temp_file("flat.ini", "[manifold]\ndim = 2\nJ = canonical\n[hamiltonian]\nH = \"q1\"\n");
  auto r = gchs_run({"bracket", flat, "--f", "q1", "--g", "p1", "--at", "0.3,0.4"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("bracket 1\n", 0) == 0);
  r = gchs_run({"bracket", kScenarios + "/chi-q.ini", "--f", "q1*p1", "--g", "q1*p1", "--at", "0.3,0.4"});
  CHECK(r.out.rfind("bracket 0\n", 0) == 0);
  const auto chi = temp_file("chi.ini", kMinimal);
  r = gchs_run({"bracket", chi, "--f", "q1", "--g", "p1", "--at", "0.5,2.0"});
  CHECK(r.out == "bracket 1.5\nghs 1\nxchi 0.5\nw -2\n");
  r = gchs_run({"bracket", kScenarios + "/chi-q.ini", "--f", "q1", "--g", "p1", "--at", "0.5,2.0"});
  CHECK(r.out.rfind("bracket 1.1499999999999999\n", 0) == 0);
  CHECK(gchs_run({"bracket", chi, "--f", "q1 +", "--g", "p1", "--at", "0,0"}).code == 2);
  CHECK(gchs_run({"bracket", chi, "--f", "q1", "--g", "p1", "--at", "0"}).code == 1);
  CHECK(gchs_run({"bracket", chi, "--f", "q1", "--g", "p1"}).code == 1);
}
