#include "willis/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace willis {

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const ConfigIssue& i : issues) {
    os << "\n  ";
    if (i.line > 0) os << "line " << i.line << ": ";
    os << i.message;
  }
  return os.str();
}

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  std::size_t a = s.find_first_not_of(ws);
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

const std::set<std::string> kSections = {"material", "grid", "scheme", "initial", "lift", "run", "verify", "manufactured"};
const std::set<std::string> kSuites = {"all",        "symmetry",  "kernels",  "sweep",       "reduction",
                                       "propagation", "galilean", "hooke",    "compatibility", "residuals",
                                       "energy"};

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> keys;
};

class Reader {
 public:
  explicit Reader(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    Section* cur = nullptr;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = raw;
      if (std::size_t h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') {
          issue(line, "malformed section header '" + s + "'");
          cur = nullptr;
          continue;
        }
        std::string name = lower(trim(s.substr(1, s.size() - 2)));
        if (!kSections.count(name)) {
          issue(line, "unknown section [" + name + "]");
          cur = nullptr;
          continue;
        }
        if (sections_.count(name)) {
          issue(line, "duplicate section [" + name + "]");
          cur = nullptr;
          continue;
        }
        cur = &sections_[name];
        cur->line = line;
        continue;
      }
      std::size_t eq = s.find('=');
      if (eq == std::string::npos) {
        issue(line, "expected 'key = value', got '" + s + "'");
        continue;
      }
      std::string key = lower(trim(s.substr(0, eq)));
      std::string value = trim(s.substr(eq + 1));
      if (!cur) {
        issue(line, "key '" + key + "' outside of a known section");
        continue;
      }
      if (key.empty()) {
        issue(line, "empty key");
        continue;
      }
      if (cur->keys.count(key)) {
        issue(line, "duplicate key '" + key + "'");
        continue;
      }
      cur->keys[key] = {value, line, false};
    }
  }

  bool has(const std::string& sec) const { return sections_.count(sec) > 0; }
  int section_line(const std::string& sec) const { return has(sec) ? sections_.at(sec).line : 0; }

  Entry* find(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.keys.find(key);
    if (k == s->second.keys.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  bool has_key(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.keys.count(key) > 0;
  }

  Expr expr(const std::string& sec, const std::string& key, Expr def) {
    Entry* e = find(sec, key);
    if (!e) return def;
    try {
      return Expr::parse(e->value);
    } catch (const ParseError& err) {
      issue(e->line, "cannot parse expression for '" + key + "': " + err.what());
      return def;
    }
  }

  double number(const std::string& sec, const std::string& key, double def) {
    Entry* e = find(sec, key);
    if (!e) return def;
    return to_number(e->value, e->line, key);
  }

  int integer(const std::string& sec, const std::string& key, int def) {
    Entry* e = find(sec, key);
    if (!e) return def;
    double v = to_number(e->value, e->line, key);
    if (v != static_cast<int>(v)) issue(e->line, "'" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  std::vector<double> numbers(const std::string& sec, const std::string& key, std::vector<double> def) {
    Entry* e = find(sec, key);
    if (!e) return def;
    std::vector<double> out;
    for (const std::string& s : split_list(e->value)) out.push_back(to_number(s, e->line, key));
    return out;
  }

  std::string word(const std::string& sec, const std::string& key, const std::string& def,
                   const std::set<std::string>& allowed) {
    Entry* e = find(sec, key);
    if (!e) return def;
    std::string v = lower(e->value);
    if (!allowed.empty() && !allowed.count(v)) {
      std::string opts;
      for (const std::string& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
      issue(e->line, "'" + key + "' must be one of " + opts + ", got '" + e->value + "'");
      return def;
    }
    return v;
  }

  std::string text(const std::string& sec, const std::string& key, const std::string& def) {
    Entry* e = find(sec, key);
    return e ? e->value : def;
  }

  bool flag(const std::string& sec, const std::string& key, bool def) {
    std::string v = word(sec, key, def ? "true" : "false", {"true", "false", "yes", "no", "1", "0"});
    return v == "true" || v == "yes" || v == "1";
  }

  int line_of(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return 0;
    auto k = s->second.keys.find(key);
    return k == s->second.keys.end() ? s->second.line : k->second.line;
  }

  void issue(int line, std::string msg) { issues_.push_back({line, std::move(msg)}); }

  void report_unused() {
    for (const auto& [name, sec] : sections_)
      for (const auto& [key, e] : sec.keys)
        if (!e.used) issue(e.line, "unknown key '" + key + "' in [" + name + "]");
    std::sort(issues_.begin(), issues_.end(), [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
  }

  std::vector<ConfigIssue>& issues() { return issues_; }

 private:
  double to_number(const std::string& s, int line, const std::string& key) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      issue(line, "'" + key + "' expects a number, got '" + s + "'");
      return 0.0;
    }
  }

  std::map<std::string, Section> sections_;
  std::vector<ConfigIssue> issues_;
};

std::array<double, 3> triple(Reader& r, const std::string& sec, const std::string& key, double def) {
  std::vector<double> v = r.numbers(sec, key, {def});
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  r.issue(r.line_of(sec, key), "'" + key + "' takes one or three values");
  return {def, def, def};
}

std::string s_key(int i, int j, int k) {
  return "s" + std::to_string(i + 1) + std::to_string(j + 1) + std::to_string(k + 1);
}

void parse_material(Reader& r, RunConfig& cfg) {
  const std::string sec = "material";
  std::string model = r.word(sec, "model", "isotropic", {"isotropic", "voigt"});
  Expr rho = r.expr(sec, "rho", 1.0);
  cfg.coupling = r.word(sec, "coupling", "zero", {"zero", "symmetric", "full"});

  std::array<Expr, 27> S = MaterialSpec::coupling_zero();
  if (cfg.coupling == "symmetric") {
    std::array<Expr, 10> p;
    int q = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        for (int k = j; k < 3; ++k) p[q++] = r.expr(sec, s_key(i, j, k), 0.0);
    S = MaterialSpec::coupling_totally_symmetric(p);
  } else if (cfg.coupling == "full") {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) S[9 * i + 3 * j + k] = r.expr(sec, s_key(i, j, k), 0.0);
  }

  try {
    if (model == "isotropic") {
      if (!r.has_key(sec, "lambda")) r.issue(r.section_line(sec), "isotropic material needs 'lambda'");
      if (!r.has_key(sec, "mu")) r.issue(r.section_line(sec), "isotropic material needs 'mu'");
      Expr lam = r.expr(sec, "lambda", 0.0);
      Expr mu = r.expr(sec, "mu", 1.0);
      cfg.material = MaterialSpec::isotropic(rho, lam, mu, S);
    } else {
      std::array<Expr, 21> voigt;
      int q = 0;
      for (int a = 0; a < 6; ++a)
        for (int b = a; b < 6; ++b) voigt[q++] = r.expr(sec, "c" + std::to_string(a + 1) + std::to_string(b + 1), 0.0);
      cfg.material = MaterialSpec::from_voigt(rho, voigt, S);
    }
  } catch (const std::exception& e) {
    r.issue(r.section_line(sec), std::string("material: ") + e.what());
  }
}

void check_material(Reader& r, RunConfig& cfg) {
  if (!cfg.material) return;
  const std::string sec = "material";
  const GridConfig& g = cfg.grid;
  Vec3 x;
  for (int a = 0; a < 3; ++a) x(a) = 0.5 * (g.lower[a] + g.upper[a]);
  try {
    MaterialSample m = cfg.material->sample(x(0), x(1), x(2), 0.0);
    ElasticReport er = validate_elastic(m.C, 1e-12);
    if (!er.ok())
      r.issue(r.section_line(sec), "stiffness at the domain centre is not an admissible elasticity tensor "
                                   "(major/minor symmetry and positive definiteness on symmetric matrices)");
    CouplingReport cr = validate_coupling(m.S, 1e-12);
    if (cr.status != CouplingSymmetry::totally_symmetric) {
      std::ostringstream os;
      os << "coupling tensor fails the symmetry check S_ijk = S_jki (max violation " << cr.cc2_violation
         << ", first-pair violation " << cr.cc1_violation
         << "); the first-order system requires a totally symmetric coupling tensor";
      r.issue(r.line_of(sec, "coupling"), os.str());
    }
  } catch (const DensityError& e) {
    r.issue(r.line_of(sec, "rho"), std::string("density: ") + e.what());
  }
}

void parse_grid(Reader& r, RunConfig& cfg) {
  const std::string sec = "grid";
  if (!r.has(sec)) {
    r.issue(0, "missing section [grid]");
    return;
  }
  GridConfig& g = cfg.grid;
  g.lower = triple(r, sec, "lower", 0.0);
  g.upper = triple(r, sec, "upper", 1.0);
  std::vector<double> c = r.numbers(sec, "cells", {16});
  if (c.size() == 1) c = {c[0], c[0], c[0]};
  if (c.size() != 3) {
    r.issue(r.line_of(sec, "cells"), "'cells' takes one or three values");
    c = {16, 16, 16};
  }
  for (int a = 0; a < 3; ++a) {
    g.cells[a] = static_cast<int>(c[a]);
    if (c[a] != g.cells[a] || g.cells[a] < 8) r.issue(r.line_of(sec, "cells"), "'cells' must be integers >= 8");
    if (!(g.upper[a] > g.lower[a])) r.issue(r.line_of(sec, "upper"), "'upper' must exceed 'lower' on every axis");
  }
  g.mode = r.word(sec, "mode", "periodic", {"periodic", "bounded"}) == "bounded" ? BoundaryMode::bounded_box
                                                                                 : BoundaryMode::periodic;
}

void parse_rest(Reader& r, RunConfig& cfg) {
  cfg.scheme.order = r.integer("scheme", "order", 2);
  cfg.scheme.cfl = r.number("scheme", "cfl", 0.4);
  cfg.scheme.dissipation = r.number("scheme", "dissipation", 0.0);
  try {
    cfg.scheme.validate();
  } catch (const std::invalid_argument& e) {
    r.issue(r.section_line("scheme"), e.what());
  }

  for (int a = 0; a < 3; ++a) {
    cfg.initial.u0[a] = r.expr("initial", "u" + std::to_string(a + 1), 0.0);
    cfg.initial.mu0[a] = r.expr("initial", "mu" + std::to_string(a + 1), 0.0);
    cfg.lift[a] = r.expr("lift", "u" + std::to_string(a + 1), 0.0);
    cfg.lift_given = cfg.lift_given || !cfg.lift[a].is_zero();
  }

  cfg.T = r.number("run", "t", 0.0);
  if (cfg.T < 0.0) r.issue(r.line_of("run", "t"), "'T' must be >= 0");
  cfg.snapshot_every = r.integer("run", "snapshot_every", 0);
  if (cfg.snapshot_every < 0) r.issue(r.line_of("run", "snapshot_every"), "'snapshot_every' must be >= 0");
  cfg.output_dir = r.text("run", "output", "out");
  cfg.format = r.word("run", "format", "text", {"text", "binary"}) == "binary" ? SnapshotFormat::binary
                                                                              : SnapshotFormat::text;
  cfg.threads = r.integer("run", "threads", 0);
  if (cfg.threads < 0) r.issue(r.line_of("run", "threads"), "'threads' must be >= 0");
  cfg.kernel = r.word("run", "kernel", "parallel", {"parallel", "reference"}) == "reference" ? KernelKind::reference
                                                                                             : KernelKind::parallel;
  cfg.warn_only_A0 = r.flag("run", "warn_only_a0", false);

  if (r.has_key("verify", "suites")) {
    cfg.suites.clear();
    for (const std::string& s : split_list(r.text("verify", "suites", ""))) {
      std::string name = lower(s);
      if (!kSuites.count(name)) r.issue(r.line_of("verify", "suites"), "unknown verification suite '" + s + "'");
      cfg.suites.push_back(name);
    }
  }
  cfg.fine_cells = r.integer("verify", "fine_cells", 0);
  cfg.verify_T = r.number("verify", "t", 0.0);

  if (r.has("manufactured")) {
    cfg.has_manufactured = true;
    for (int a = 0; a < 3; ++a) cfg.manufactured.U[a] = r.expr("manufactured", "u" + std::to_string(a + 1), 0.0);
    cfg.manufactured.omega = r.number("manufactured", "omega", 1.0);
    std::vector<double> c = r.numbers("manufactured", "cells", {16, 24, 32});
    cfg.manufactured_cells.clear();
    for (double v : c) cfg.manufactured_cells.push_back(static_cast<int>(v));
    if (cfg.manufactured_cells.size() < 3)
      r.issue(r.line_of("manufactured", "cells"), "the refinement study needs at least three grids");
    cfg.manufactured_T = r.number("manufactured", "t", 0.1);
    for (int a = 0; a < 3; ++a)
      if (cfg.manufactured.U[a].depends_on(Var::t))
        r.issue(r.line_of("manufactured", "u" + std::to_string(a + 1)),
                "manufactured profile must not depend on t (time enters as cos(omega t))");
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

Grid GridConfig::make() const {
  std::array<double, 3> ext;
  for (int a = 0; a < 3; ++a) ext[a] = upper[a] - lower[a];
  return Grid(lower, ext, cells, mode);
}

RunConfig parse_config(const std::string& text) {
  Reader r(text);
  RunConfig cfg;
  if (!r.has("material")) r.issue(0, "missing section [material]");
  else parse_material(r, cfg);
  parse_grid(r, cfg);
  parse_rest(r, cfg);
  check_material(r, cfg);
  r.report_unused();
  if (!r.issues().empty()) throw ConfigError(r.issues());
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{0, "cannot open configuration file '" + path + "'"}});
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str());
  apply_environment(cfg);
  return cfg;
}

void apply_environment(RunConfig& cfg) {
  if (const char* d = std::getenv("WILLIS_OUTPUT_DIR"); d && *d) cfg.output_dir = d;
  if (const char* t = std::getenv("WILLIS_THREADS"); t && *t) {
    char* end = nullptr;
    long n = std::strtol(t, &end, 10);
    if (*end != '\0' || n < 0) throw ConfigError({{0, std::string("WILLIS_THREADS must be a non-negative integer, got '") + t + "'"}});
    cfg.threads = static_cast<int>(n);
  }
}

}  // namespace willis
