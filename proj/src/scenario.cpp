#include "gchs/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gchs {

namespace {

struct Item {
  std::string text;
  int column = 1;  // 1-based column of the first character of text
};

struct Entry {
  std::string key;
  std::vector<Item> items;
  int line = 0;
  int key_column = 1;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Entry> entries;
};

class Reader {
 public:
  Reader(const std::string& text, std::string source) : source_(std::move(source)) { read(text); }

  [[noreturn]] void fail(int line, int column, const std::string& what) const {
    throw ScenarioError(source_, line, column, what);
  }

  const Section* section(const std::string& name) const {
    for (const auto& s : sections_)
      if (s.name == name) return &s;
    return nullptr;
  }
  const std::vector<Section>& sections() const { return sections_; }
  const std::string& source() const { return source_; }

 private:
  void read(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      const std::string body = strip_comment(raw, line);
      const auto first = body.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      if (body[first] == '[') {
        const auto close = body.find(']', first);
        if (close == std::string::npos) fail(line, static_cast<int>(first) + 1, "unterminated section header");
        if (body.find_first_not_of(" \t", close + 1) != std::string::npos)
          fail(line, static_cast<int>(close) + 2, "unexpected text after section header");
        const std::string name = trim(body.substr(first + 1, close - first - 1));
        for (const auto& s : sections_)
          if (s.name == name) fail(line, static_cast<int>(first) + 1, "duplicate section [" + name + "]");
        sections_.push_back({name, line, {}});
        continue;
      }
      if (sections_.empty()) fail(line, static_cast<int>(first) + 1, "key outside of any section");
      const auto eq = body.find('=');
      if (eq == std::string::npos) fail(line, static_cast<int>(first) + 1, "expected key = value");
      Entry e;
      e.key = trim(body.substr(first, eq - first));
      e.line = line;
      e.key_column = static_cast<int>(first) + 1;
      if (e.key.empty()) fail(line, e.key_column, "empty key");
      for (const auto& other : sections_.back().entries)
        if (other.key == e.key) fail(line, e.key_column, "duplicate key '" + e.key + "'");
      e.items = split_items(body, eq + 1, line);
      sections_.back().entries.push_back(std::move(e));
    }
  }

  std::string strip_comment(const std::string& s, int line) const {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    if (quoted) fail(line, static_cast<int>(s.rfind('"')) + 1, "unterminated string");
    return s;
  }

  std::vector<Item> split_items(const std::string& s, std::size_t from, int line) const {
    std::vector<Item> items;
    std::size_t i = from;
    while (true) {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
      Item item;
      if (i < s.size() && s[i] == '"') {
        const auto close = s.find('"', i + 1);
        item.text = s.substr(i + 1, close - i - 1);
        item.column = static_cast<int>(i) + 2;
        i = close + 1;
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
      } else {
        const auto end = s.find(',', i);
        const auto stop = end == std::string::npos ? s.size() : end;
        item.text = trim(s.substr(i, stop - i));
        item.column = static_cast<int>(i) + 1;
        i = stop;
      }
      items.push_back(std::move(item));
      if (i >= s.size()) break;
      if (s[i] != ',') fail(line, static_cast<int>(i) + 1, "expected ',' between values");
      ++i;
    }
    if (items.size() == 1 && items[0].text.empty()) fail(line, items[0].column, "missing value");
    return items;
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
  }

  std::string source_;
  std::vector<Section> sections_;
};

class Builder {
 public:
  Builder(const Reader& r, Scenario& sc) : r_(r), sc_(sc) {}

  const Entry* find(const Section* s, const std::string& key) const {
    if (!s) return nullptr;
    for (const auto& e : s->entries)
      if (e.key == key) return &e;
    return nullptr;
  }

  const Item& single(const Entry& e) const {
    if (e.items.size() != 1) r_.fail(e.line, e.key_column, "'" + e.key + "' takes a single value");
    return e.items[0];
  }

  double number(const Item& item, int line) const {
    double v = 0.0;
    const char* b = item.text.data();
    const char* end = b + item.text.size();
    if (!item.text.empty() && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
      r_.fail(line, item.column, "expected a number, got '" + item.text + "'");
    return v;
  }

  long long integer(const Item& item, int line) const {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(item.text.data(), item.text.data() + item.text.size(), v);
    if (ec != std::errc() || ptr != item.text.data() + item.text.size())
      r_.fail(line, item.column, "expected an integer, got '" + item.text + "'");
    return v;
  }

  ScalarExpr expr(const Item& item, int line) const {
    try {
      return parse(item.text, sc_.dim, sc_.coords);
    } catch (const ParseError& e) {
      r_.fail(line, item.column + static_cast<int>(e.position()), e.what());
    }
  }

  std::vector<double> vector_of(const Entry& e) const {
    if (static_cast<int>(e.items.size()) != sc_.dim)
      r_.fail(e.line, e.key_column,
              "'" + e.key + "' needs " + std::to_string(sc_.dim) + " values, got " + std::to_string(e.items.size()));
    std::vector<double> v;
    for (const auto& item : e.items) v.push_back(number(item, e.line));
    return v;
  }

  void check_keys(const Section* s, const std::set<std::string>& allowed, bool J_entries = false,
                  bool E_entries = false) const {
    if (!s) return;
    for (const auto& e : s->entries) {
      if (allowed.count(e.key)) continue;
      if (J_entries && entry_index(e.key, 'J', 2)) continue;
      if (E_entries && entry_index(e.key, 'E', 1)) continue;
      r_.fail(e.line, e.key_column, "unknown key '" + e.key + "' in [" + s->name + "]");
    }
  }

  // "J12" -> {0,1}; "E3" -> {2}. Digits are single characters (n <= 8).
  std::optional<std::vector<int>> entry_index(const std::string& key, char prefix, std::size_t digits) const {
    if (key.size() != 1 + digits || key[0] != prefix) return std::nullopt;
    std::vector<int> out;
    for (std::size_t k = 1; k < key.size(); ++k) {
      if (key[k] < '1' || key[k] > '9') return std::nullopt;
      out.push_back(key[k] - '1');
    }
    return out;
  }

  void build() {
    for (const auto& s : r_.sections())
      if (s.name != "manifold" && s.name != "frame" && s.name != "hamiltonian" && s.name != "audit" &&
          s.name != "simulate")
        r_.fail(s.line, 1, "unknown section [" + s.name + "]");

    const Section* man = r_.section("manifold");
    if (!man) r_.fail(1, 0, "missing [manifold] section");
    check_keys(man, {"dim", "coords", "chi", "J", "A"}, true);
    const Entry* dim = find(man, "dim");
    if (!dim) r_.fail(man->line, 1, "[manifold] needs 'dim'");
    const long long n = integer(single(*dim), dim->line);
    if (n < 1 || n > kMaxDim) r_.fail(dim->line, single(*dim).column, "dim must be in 1.." + std::to_string(kMaxDim));
    sc_.dim = static_cast<int>(n);

    if (const Entry* c = find(man, "coords")) {
      if (static_cast<int>(c->items.size()) != sc_.dim)
        r_.fail(c->line, c->key_column, "coords needs one name per dimension");
      for (const auto& item : c->items) {
        const bool ok = !item.text.empty() && std::isalpha(static_cast<unsigned char>(item.text[0])) &&
                        item.text.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") ==
                            std::string::npos;
        if (!ok) r_.fail(c->line, item.column, "invalid coordinate name '" + item.text + "'");
        sc_.coords.push_back(item.text);
      }
    } else {
      sc_.coords = default_names(sc_.dim);
    }

    ScalarExpr chi = ScalarExpr::constant(0.0, sc_.dim);
    if (const Entry* c = find(man, "chi")) {
      sc_.chi_text = single(*c).text;
      chi = expr(single(*c), c->line);
    }

    std::optional<Matrix<ScalarExpr>> frame;
    if (const Section* fs = r_.section("frame")) {
      check_keys(fs, {}, false, true);
      sc_.frame_text.assign(sc_.dim, {});
      Matrix<ScalarExpr> rows(sc_.dim);
      for (const auto& e : fs->entries) {
        const int i = (*entry_index(e.key, 'E', 1))[0];
        if (i >= sc_.dim) r_.fail(e.line, e.key_column, "frame row " + e.key + " exceeds dim");
        if (static_cast<int>(e.items.size()) != sc_.dim)
          r_.fail(e.line, e.key_column, e.key + " needs " + std::to_string(sc_.dim) + " components");
        for (int a = 0; a < sc_.dim; ++a) {
          rows(i, a) = expr(e.items[a], e.line);
          sc_.frame_text[i].push_back(e.items[a].text);
        }
      }
      for (int i = 0; i < sc_.dim; ++i)
        if (sc_.frame_text[i].empty()) r_.fail(fs->line, 1, "[frame] is missing row E" + std::to_string(i + 1));
      frame = std::move(rows);
    }

    const Entry* Jc = find(man, "J");
    std::vector<const Entry*> Jentries;
    for (const auto& e : man->entries)
      if (entry_index(e.key, 'J', 2)) Jentries.push_back(&e);
    std::shared_ptr<PoissonWManifold> M;
    if (Jc) {
      if (!Jentries.empty()) r_.fail(Jentries[0]->line, Jentries[0]->key_column, "explicit J entries conflict with J = canonical");
      if (single(*Jc).text != "canonical") r_.fail(Jc->line, single(*Jc).column, "J must be 'canonical' or given as Jij entries");
      if (sc_.dim % 2 != 0) r_.fail(Jc->line, single(*Jc).column, "canonical J needs an even dimension");
      sc_.canonical = true;
      M = std::make_shared<PoissonWManifold>(PoissonWManifold::canonical(sc_.dim / 2, chi, frame));
    } else {
      if (Jentries.empty()) r_.fail(man->line, 1, "[manifold] needs J = canonical or Jij entries");
      Matrix<ScalarExpr> J(sc_.dim, ScalarExpr::constant(0.0, sc_.dim));
      sc_.J_text = Matrix<std::string>(sc_.dim, "0");
      Matrix<const Entry*> given(sc_.dim, nullptr);
      for (const Entry* e : Jentries) {
        const auto ij = *entry_index(e->key, 'J', 2);
        if (ij[0] >= sc_.dim || ij[1] >= sc_.dim) r_.fail(e->line, e->key_column, e->key + " exceeds dim");
        given(ij[0], ij[1]) = e;
        J(ij[0], ij[1]) = expr(single(*e), e->line);
        sc_.J_text(ij[0], ij[1]) = single(*e).text;
      }
      for (int i = 0; i < sc_.dim; ++i)
        for (int j = 0; j < sc_.dim; ++j)
          if (given(i, j) && !given(j, i)) {
            sc_.J_text(j, i) = "-(" + sc_.J_text(i, j) + ")";
            J(j, i) = parse(sc_.J_text(j, i), sc_.dim, sc_.coords);
          }
      check_antisymmetry(J, given);
      M = std::make_shared<PoissonWManifold>(sc_.dim, std::move(J), chi, frame);
    }

    if (const Entry* A = find(man, "A")) {
      if (static_cast<int>(A->items.size()) != sc_.dim) r_.fail(A->line, A->key_column, "A needs one entry per dimension");
      std::vector<ScalarExpr> override_A;
      for (const auto& item : A->items) {
        override_A.push_back(expr(item, A->line));
        sc_.A_override_text.push_back(item.text);
      }
      M->set_structural_override(std::move(override_A));
    }
    sc_.manifold = M;

    const Section* ham = r_.section("hamiltonian");
    if (!ham) r_.fail(1, 0, "missing [hamiltonian] section");
    check_keys(ham, {"H"});
    const Entry* H = find(ham, "H");
    if (!H) r_.fail(ham->line, 1, "[hamiltonian] needs 'H'");
    sc_.H_text = single(*H).text;
    sc_.H = expr(single(*H), H->line);

    build_audit();
    build_simulate();
  }

  std::vector<std::vector<double>> validation_points() const {
    std::vector<std::pair<double, double>> box(sc_.dim, {-1.0, 1.0});
    if (sc_.audit) box = sc_.audit->box;
    std::vector<std::vector<double>> pts;
    if (sc_.dim <= 4) {
      int total = 1;
      for (int a = 0; a < sc_.dim; ++a) total *= 3;
      for (int k = 0; k < total; ++k) {
        std::vector<double> x(sc_.dim);
        int code = k;
        for (int a = 0; a < sc_.dim; ++a, code /= 3)
          x[a] = box[a].first + 0.5 * (code % 3) * (box[a].second - box[a].first);
        pts.push_back(std::move(x));
      }
    } else {
      pts = sample_points(box, 100, 0x5eed);
    }
    return pts;
  }

  void check_antisymmetry(const Matrix<ScalarExpr>& J, const Matrix<const Entry*>& given) {
    // box comes from [audit] when present; parse it first so the grid matches the sampling region
    build_audit();
    const auto pts = validation_points();
    for (const auto& x : pts)
      for (int i = 0; i < sc_.dim; ++i)
        for (int j = i; j < sc_.dim; ++j) {
          double a = 0.0, b = 0.0;
          try {
            a = J(i, j)(std::span<const double>(x));
            b = J(j, i)(std::span<const double>(x));
          } catch (const NumericDomainError&) {
            continue;
          }
          if (std::abs(a + b) > kAntisymmetryTol) {
            const Entry* at = given(i, j) ? given(i, j) : given(j, i);
            const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
            const std::string ji = std::to_string(j + 1) + std::to_string(i + 1);
            r_.fail(at->line, at->key_column,
                    "structure matrix not antisymmetric: J" + ij + " != -J" + ji + (i == j ? " (diagonal must vanish)" : ""));
          }
        }
  }

  void build_audit() {
    if (audit_done_) return;
    audit_done_ = true;
    const Section* s = r_.section("audit");
    if (!s) return;
    check_keys(s, {"box", "samples", "seed", "identities", "pool"});
    AuditSection a;
    a.box.assign(sc_.dim, {-1.0, 1.0});
    if (const Entry* b = find(s, "box")) {
      if (b->items.size() != 1 && static_cast<int>(b->items.size()) != sc_.dim)
        r_.fail(b->line, b->key_column, "box needs one interval or one per axis");
      std::vector<std::pair<double, double>> iv;
      for (const auto& item : b->items) {
        const auto colon = item.text.find(':');
        if (colon == std::string::npos) r_.fail(b->line, item.column, "interval must be lo:hi");
        Item lo{item.text.substr(0, colon), item.column};
        Item hi{item.text.substr(colon + 1), item.column + static_cast<int>(colon) + 1};
        const double l = number(lo, b->line), h = number(hi, b->line);
        if (!(l < h)) r_.fail(b->line, item.column, "interval must satisfy lo < hi");
        iv.emplace_back(l, h);
      }
      if (iv.size() == 1) iv.assign(sc_.dim, iv[0]);
      a.box = iv;
    }
    if (const Entry* e = find(s, "samples")) {
      const long long v = integer(single(*e), e->line);
      if (v < 1) r_.fail(e->line, single(*e).column, "samples must be at least 1");
      a.samples = static_cast<std::size_t>(v);
    }
    if (const Entry* e = find(s, "seed")) {
      const long long v = integer(single(*e), e->line);
      if (v < 0) r_.fail(e->line, single(*e).column, "seed must be non-negative");
      a.seed = static_cast<std::uint64_t>(v);
    }
    if (const Entry* e = find(s, "identities")) {
      if (!(e->items.size() == 1 && e->items[0].text == "all")) {
        for (const auto& item : e->items) {
          bool known = false;
          for (const auto& spec : identity_catalog()) known = known || spec.id == item.text;
          if (!known) r_.fail(e->line, item.column, "unknown identity '" + item.text + "'");
          a.identities.push_back(item.text);
        }
      }
    }
    if (const Entry* e = find(s, "pool")) {
      for (const auto& item : e->items) {
        a.pool.push_back(expr(item, e->line));
        a.pool_text.push_back(item.text);
      }
    } else {
      a.pool_text = default_pool(sc_.coords);
      for (const auto& t : a.pool_text) a.pool.push_back(parse(t, sc_.dim, sc_.coords));
    }
    sc_.audit = std::move(a);
  }

  void build_simulate() {
    const Section* s = r_.section("simulate");
    if (!s) return;
    check_keys(s, {"x0", "t0", "t1", "h", "method", "convention", "observables", "v"});
    SimulateSection sim;
    const Entry* x0 = find(s, "x0");
    if (!x0) r_.fail(s->line, 1, "[simulate] needs 'x0'");
    sim.x0 = vector_of(*x0);
    if (const Entry* e = find(s, "t0")) sim.t0 = number(single(*e), e->line);
    if (const Entry* e = find(s, "t1")) sim.t1 = number(single(*e), e->line);
    if (const Entry* e = find(s, "h")) {
      sim.h = number(single(*e), e->line);
      if (!(sim.h > 0.0)) r_.fail(e->line, single(*e).column, "h must be positive");
    }
    if (!(sim.t1 > sim.t0)) r_.fail(s->line, 1, "[simulate] needs t1 > t0");
    if (const Entry* e = find(s, "method")) {
      const auto m = parse_method(single(*e).text);
      if (!m) r_.fail(e->line, single(*e).column, "method must be rk4 or rk45");
      sim.method = *m;
    }
    if (const Entry* e = find(s, "convention")) {
      const auto c = parse_convention(single(*e).text);
      if (!c) r_.fail(e->line, single(*e).column, "convention must be transport, damped-literal or nghs-literal");
      sim.convention = *c;
    }
    if (const Entry* e = find(s, "observables")) {
      for (const auto& item : e->items) {
        sim.observables.push_back(expr(item, e->line));
        sim.observables_text.push_back(item.text);
      }
    }
    if (const Entry* e = find(s, "v")) sim.v = vector_of(*e);
    sc_.simulate = std::move(sim);
  }

 private:
  const Reader& r_;
  Scenario& sc_;
  bool audit_done_ = false;
};

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string quoted_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + quote(items[i]);
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string number_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out;
}

std::string stem(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = base.rfind('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

}  // namespace

std::vector<std::string> default_pool(const std::vector<std::string>& coords) {
  const std::string& a = coords.front();
  const std::string& b = coords.size() > 1 ? coords[1] : coords.front();
  const std::string& z = coords.back();
  return {a,
          b + " + 0.5*" + a,
          a + "*" + b,
          a + "^2 - 0.3*" + z,
          a + "*" + b + "*" + z + " + 0.2*" + b + "^3",
          "0.5*" + z + "^2*" + a + " - " + b,
          "sin(" + a + ")*cos(" + z + ")",
          "exp(0.3*" + b + ")*" + a};
}

ScalarExpr Scenario::expr(const std::string& text) const { return parse(text, dim, coords); }

AuditContext Scenario::audit_context(Convention convention) const {
  AuditContext ctx;
  ctx.manifold = manifold.get();
  ctx.H = H;
  if (audit) {
    ctx.pool = audit->pool;
  } else {
    for (const auto& t : default_pool(coords)) ctx.pool.push_back(expr(t));
  }
  if (simulate) ctx.v = simulate->v;
  ctx.convention = convention;
  return ctx;
}

std::string Scenario::echo() const {
  std::ostringstream out;
  auto norm = [&](const std::string& t) { return expr(t).to_string(coords); };
  out << "# scenario " << name << "\n[manifold]\n";
  out << "dim = " << dim << "\n";
  out << "coords = ";
  for (int i = 0; i < dim; ++i) out << (i ? ", " : "") << coords[i];
  out << "\nchi = " << quote(norm(chi_text)) << "\n";
  if (canonical) {
    out << "J = canonical\n";
  } else {
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        out << "J" << i + 1 << j + 1 << " = " << quote(norm(J_text(i, j))) << "\n";
  }
  if (!A_override_text.empty()) {
    std::vector<std::string> A;
    for (const auto& t : A_override_text) A.push_back(norm(t));
    out << "A = " << quoted_list(A) << "\n";
  }
  if (!frame_text.empty()) {
    out << "\n[frame]\n";
    for (int i = 0; i < dim; ++i) {
      std::vector<std::string> row;
      for (const auto& t : frame_text[i]) row.push_back(norm(t));
      out << "E" << i + 1 << " = " << quoted_list(row) << "\n";
    }
  }
  out << "\n[hamiltonian]\nH = " << quote(norm(H_text)) << "\n";
  if (audit) {
    out << "\n[audit]\nbox = ";
    for (int a = 0; a < dim; ++a) out << (a ? ", " : "") << num(audit->box[a].first) << ":" << num(audit->box[a].second);
    out << "\nsamples = " << audit->samples << "\nseed = " << audit->seed << "\nidentities = ";
    if (audit->identities.empty()) {
      out << "all";
    } else {
      for (std::size_t i = 0; i < audit->identities.size(); ++i) out << (i ? ", " : "") << audit->identities[i];
    }
    std::vector<std::string> pool;
    for (const auto& t : audit->pool_text) pool.push_back(norm(t));
    out << "\npool = " << quoted_list(pool) << "\n";
  }
  if (simulate) {
    out << "\n[simulate]\nx0 = " << number_list(simulate->x0) << "\n";
    out << "t0 = " << num(simulate->t0) << "\nt1 = " << num(simulate->t1) << "\nh = " << num(simulate->h) << "\n";
    out << "method = " << to_string(simulate->method) << "\nconvention = " << to_string(simulate->convention) << "\n";
    if (!simulate->observables_text.empty()) {
      std::vector<std::string> obs;
      for (const auto& t : simulate->observables_text) obs.push_back(norm(t));
      out << "observables = " << quoted_list(obs) << "\n";
    }
    if (simulate->v) out << "v = " << number_list(*simulate->v) << "\n";
  }
  return out.str();
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Reader reader(text, source);
  Scenario sc;
  sc.name = stem(source);
  Builder(reader, sc).build();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path, 0, 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace gchs
