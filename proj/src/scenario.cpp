#include "carnot/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carnot/rng.hpp"

namespace carnot {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out + "]";
}

std::string fmt_list(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

// ---- config parsing ---------------------------------------------------

struct Value {
  std::string raw;
  int line;

  double number(const std::string& field) const {
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0')
      throw ConfigError("expected a number for " + field + ", got '" + raw + "'", line, field);
    return v;
  }
  long integer(const std::string& field) const {
    const double v = number(field);
    if (v != std::floor(v))
      throw ConfigError("expected an integer for " + field, line, field);
    return static_cast<long>(v);
  }
  std::string str(const std::string& field) const {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
      return raw.substr(1, raw.size() - 2);
    throw ConfigError("expected a quoted string for " + field, line, field);
  }
  std::vector<double> list(const std::string& field) const {
    if (raw.empty() || raw.front() != '[' || raw.back() != ']')
      throw ConfigError("expected a list for " + field, line, field);
    std::vector<double> out;
    std::string inner = raw.substr(1, raw.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::size_t b = item.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      const std::size_t e = item.find_last_not_of(" \t");
      Value v{item.substr(b, e - b + 1), line};
      out.push_back(v.number(field));
    }
    return out;
  }
  std::vector<int> int_list(const std::string& field) const {
    std::vector<int> out;
    for (double v : list(field)) {
      if (v != std::floor(v)) throw ConfigError("expected integers in " + field, line, field);
      out.push_back(static_cast<int>(v));
    }
    return out;
  }
};

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Scenario parse_config(const std::string& text) {
  Scenario s;
  std::string section;
  AnalysisConfig* analysis = nullptr;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    // strip comments outside quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header", lineno, "");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "analysis") {
        s.analyses.emplace_back();
        analysis = &s.analyses.back();
      } else if (section != "scenario" && section != "group" && section != "problem" &&
                 section != "grid" && section != "solver") {
        throw ConfigError("unknown section [" + section + "]", lineno, section);
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", lineno, section);
    const std::string key = trim(line.substr(0, eq));
    const Value val{trim(line.substr(eq + 1)), lineno};
    const std::string path = section + "." + key;

    if (section == "scenario") {
      if (key == "id") s.id = val.str(path);
      else if (key == "seed") s.seed = static_cast<std::uint64_t>(val.integer(path));
      else throw ConfigError("unknown key " + path, lineno, path);
    } else if (section == "group") {
      if (key == "name") s.group.name = val.str(path);
      else if (key == "dim") s.group.dim = static_cast<int>(val.integer(path));
      else throw ConfigError("unknown key " + path, lineno, path);
    } else if (section == "problem") {
      ProblemConfig& p = s.problem;
      if (key == "kind") p.kind = val.str(path);
      else if (key == "a") p.a = val.str(path);
      else if (key == "a_values") p.a_values = val.list(path);
      else if (key == "b") p.b = val.str(path);
      else if (key == "b_values") p.b_values = val.list(path);
      else if (key == "f") p.f = val.str(path);
      else if (key == "f_value") p.f_value = val.number(path);
      else if (key == "g") p.g = val.str(path);
      else if (key == "g_value") p.g_value = val.number(path);
      else if (key == "g_alpha") p.g_alpha = val.number(path);
      else if (key == "g_amplitude") p.g_amplitude = val.number(path);
      else if (key == "phi") p.phi = val.str(path);
      else if (key == "phi_value") p.phi_value = val.number(path);
      else if (key == "phi_alpha") p.phi_alpha = val.number(path);
      else if (key == "phi_amplitude") p.phi_amplitude = val.number(path);
      else if (key == "phi_offset") p.phi_offset = val.number(path);
      else if (key == "phi_base") p.phi_base = val.list(path);
      else if (key == "phi_base_t") p.phi_base_t = val.number(path);
      else if (key == "lambda") p.lambda = val.number(path);
      else if (key == "alpha") p.alpha = val.number(path);
      else throw ConfigError("unknown key " + path, lineno, path);
    } else if (section == "grid") {
      GridConfig& g = s.grid;
      if (key == "box_lo") g.box_lo = val.list(path);
      else if (key == "box_hi") g.box_hi = val.list(path);
      else if (key == "nx") g.nx = val.int_list(path);
      else if (key == "t0") g.t0 = val.number(path);
      else if (key == "t1") g.t1 = val.number(path);
      else if (key == "nt") g.nt = static_cast<int>(val.integer(path));
      else throw ConfigError("unknown key " + path, lineno, path);
    } else if (section == "solver") {
      SolverConfig& c = s.solver;
      if (key == "tol") c.tol = val.number(path);
      else if (key == "max_iter") c.max_iter = val.integer(path);
      else if (key == "sweep") c.sweep = val.str(path);
      else if (key == "workers") c.workers = static_cast<int>(val.integer(path));
      else throw ConfigError("unknown key " + path, lineno, path);
    } else if (section == "analysis") {
      AnalysisConfig& a = *analysis;
      if (key == "name") a.name = val.str(path);
      else if (key == "check") a.check = val.str(path);
      else if (key == "kind") a.kind = val.str(path);
      else if (key == "anchor") a.anchor = val.str(path);
      else if (key == "m") a.m = static_cast<int>(val.integer(path));
      else if (key == "alpha") a.alpha = val.number(path);
      else if (key == "f_mode") a.f_mode = val.str(path);
      else if (key == "gamma_target") a.gamma_target = val.number(path);
      else if (key == "kmax") a.kmax = static_cast<int>(val.integer(path));
      else if (key == "base") a.base = val.list(path);
      else if (key == "base_t") a.base_t = val.number(path);
      else if (key == "expect_min") a.expect_min = val.number(path);
      else if (key == "expect_max") a.expect_max = val.number(path);
      else if (key == "source") a.source = val.str(path);
      else if (key == "m1") a.m1 = val.number(path);
      else if (key == "m2") a.m2 = val.number(path);
      else if (key == "m3") a.m3 = val.number(path);
      else if (key == "m4") a.m4 = val.number(path);
      else if (key == "r_values") a.r_values = val.list(path);
      else if (key == "h") a.h = val.number(path);
      else if (key == "threshold") a.threshold = val.number(path);
      else if (key == "test_field") a.test_field = val.str(path);
      else if (key == "oracle") a.oracle = val.str(path);
      else if (key == "trials") a.trials = static_cast<int>(val.integer(path));
      else if (key == "bump") a.bump = val.number(path);
      else throw ConfigError("unknown key " + path, lineno, path);
    } else {
      throw ConfigError("key outside any section", lineno, key);
    }
  }

  // ---- semantic validation -------------------------------------------
  if (s.id.empty()) throw ConfigError("scenario.id is required", 0, "scenario.id");
  if (s.group.name != "euclidean" && s.group.name != "heisenberg")
    throw ConfigError("unknown group '" + s.group.name +
                          "' (registered: euclidean, heisenberg)",
                      0, "group.name");
  if (s.problem.kind != "cauchy" && s.problem.kind != "obstacle")
    throw ConfigError("problem.kind must be \"cauchy\" or \"obstacle\"", 0, "problem.kind");
  if (!(s.problem.alpha > 0.0 && s.problem.alpha < 1.0))
    throw ConfigError("problem.alpha must lie in (0,1)", 0, "problem.alpha");
  if (s.problem.lambda < 1.0)
    throw ConfigError("problem.lambda must be >= 1", 0, "problem.lambda");
  if (s.problem.kind == "obstacle" && s.problem.phi == "none")
    throw ConfigError("obstacle problems need a phi selector", 0, "problem.phi");
  if (s.grid.nt < 8) throw ConfigError("grid.nt must be >= 8", 0, "grid.nt");

  const char* aset[] = {"identity", "diag"};
  if (std::find(std::begin(aset), std::end(aset), s.problem.a) == std::end(aset))
    throw ConfigError("unknown coefficient selector '" + s.problem.a + "'", 0, "problem.a");
  const char* bset[] = {"zero", "const"};
  if (std::find(std::begin(bset), std::end(bset), s.problem.b) == std::end(bset))
    throw ConfigError("unknown drift selector '" + s.problem.b + "'", 0, "problem.b");
  const char* fset[] = {"zero", "const"};
  if (std::find(std::begin(fset), std::end(fset), s.problem.f) == std::end(fset))
    throw ConfigError("unknown source selector '" + s.problem.f + "'", 0, "problem.f");
  const char* gset[] = {"zero", "const", "sine-initial", "cusp-c1alpha"};
  if (std::find(std::begin(gset), std::end(gset), s.problem.g) == std::end(gset))
    throw ConfigError("unknown data selector '" + s.problem.g + "'", 0, "problem.g");
  const char* pset[] = {"none", "const", "neg-holder-cusp", "neg-paraboloid"};
  if (std::find(std::begin(pset), std::end(pset), s.problem.phi) == std::end(pset))
    throw ConfigError("unknown obstacle selector '" + s.problem.phi + "'", 0, "problem.phi");

  int counter = 0;
  for (auto& a : s.analyses) {
    ++counter;
    if (a.name.empty()) a.name = "check" + std::to_string(counter);
    const char* kinds[] = {"decay",     "dyadic",     "class_membership", "rescaling",
                           "oracle",    "comparison", "sobolev"};
    if (std::find(std::begin(kinds), std::end(kinds), a.check) == std::end(kinds))
      throw ConfigError("unknown analysis check '" + a.check + "'", 0, "analysis.check");
    if (a.alpha && !(*a.alpha > 0.0 && *a.alpha < 1.0))
      throw ConfigError("analysis.alpha must lie in (0,1)", 0, "analysis.alpha");
    if (a.m < 0 || a.m > 2) throw ConfigError("analysis.m must be 0, 1 or 2", 0, "analysis.m");
    if (a.check == "decay") {
      if (a.kind != "past" && a.kind != "future")
        throw ConfigError("analysis.kind must be \"past\" or \"future\"", 0, "analysis.kind");
      if (a.anchor != "obstacle" && a.anchor != "boundary")
        throw ConfigError("analysis.anchor must be \"obstacle\" or \"boundary\"", 0,
                          "analysis.anchor");
      if (a.f_mode != "raw" && a.f_mode != "p0" && a.f_mode != "p1")
        throw ConfigError("analysis.f_mode must be raw, p0 or p1", 0, "analysis.f_mode");
      if (a.anchor == "obstacle" && s.problem.phi == "none")
        throw ConfigError("decay with anchor=obstacle needs an obstacle", 0,
                          "analysis.anchor");
    }
    if (a.check == "dyadic") {
      bool found = false;
      for (const auto& other : s.analyses) {
        if (&other == &a) break;
        if (other.check == "decay" && other.name == a.source) found = true;
      }
      if (!found)
        throw ConfigError("dyadic.source must name a preceding decay analysis", 0,
                          "analysis.source");
    }
    if (a.check == "oracle") {
      if (a.oracle != "heat1d-sine")
        throw ConfigError("unknown oracle '" + a.oracle + "'", 0, "analysis.oracle");
      if (!a.threshold)
        throw ConfigError("oracle check needs a threshold", 0, "analysis.threshold");
    }
  }
  for (std::size_t i = 0; i < s.analyses.size(); ++i)
    for (std::size_t j = i + 1; j < s.analyses.size(); ++j)
      if (s.analyses[i].name == s.analyses[j].name)
        throw ConfigError("duplicate analysis name '" + s.analyses[i].name + "'", 0,
                          "analysis.name");
  return s;
}

std::string render(const Scenario& s) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "id = \"" << s.id << "\"\n";
  out << "seed = " << s.seed << "\n";
  out << "\n[group]\n";
  out << "name = \"" << s.group.name << "\"\n";
  out << "dim = " << s.group.dim << "\n";
  out << "\n[problem]\n";
  const ProblemConfig& p = s.problem;
  out << "kind = \"" << p.kind << "\"\n";
  out << "a = \"" << p.a << "\"\n";
  if (!p.a_values.empty()) out << "a_values = " << fmt_list(p.a_values) << "\n";
  out << "b = \"" << p.b << "\"\n";
  if (!p.b_values.empty()) out << "b_values = " << fmt_list(p.b_values) << "\n";
  out << "f = \"" << p.f << "\"\n";
  out << "f_value = " << fmt(p.f_value) << "\n";
  out << "g = \"" << p.g << "\"\n";
  out << "g_value = " << fmt(p.g_value) << "\n";
  out << "g_alpha = " << fmt(p.g_alpha) << "\n";
  out << "g_amplitude = " << fmt(p.g_amplitude) << "\n";
  out << "phi = \"" << p.phi << "\"\n";
  out << "phi_value = " << fmt(p.phi_value) << "\n";
  out << "phi_alpha = " << fmt(p.phi_alpha) << "\n";
  out << "phi_amplitude = " << fmt(p.phi_amplitude) << "\n";
  out << "phi_offset = " << fmt(p.phi_offset) << "\n";
  if (!p.phi_base.empty()) out << "phi_base = " << fmt_list(p.phi_base) << "\n";
  out << "phi_base_t = " << fmt(p.phi_base_t) << "\n";
  out << "lambda = " << fmt(p.lambda) << "\n";
  out << "alpha = " << fmt(p.alpha) << "\n";
  out << "\n[grid]\n";
  out << "box_lo = " << fmt_list(s.grid.box_lo) << "\n";
  out << "box_hi = " << fmt_list(s.grid.box_hi) << "\n";
  out << "nx = " << fmt_list(s.grid.nx) << "\n";
  out << "t0 = " << fmt(s.grid.t0) << "\n";
  out << "t1 = " << fmt(s.grid.t1) << "\n";
  out << "nt = " << s.grid.nt << "\n";
  out << "\n[solver]\n";
  out << "tol = " << fmt(s.solver.tol) << "\n";
  out << "max_iter = " << s.solver.max_iter << "\n";
  out << "sweep = \"" << s.solver.sweep << "\"\n";
  out << "workers = " << s.solver.workers << "\n";
  for (const auto& a : s.analyses) {
    out << "\n[analysis]\n";
    out << "name = \"" << a.name << "\"\n";
    out << "check = \"" << a.check << "\"\n";
    if (a.check == "decay") {
      out << "kind = \"" << a.kind << "\"\n";
      out << "anchor = \"" << a.anchor << "\"\n";
      out << "m = " << a.m << "\n";
      if (a.alpha) out << "alpha = " << fmt(*a.alpha) << "\n";
      out << "f_mode = \"" << a.f_mode << "\"\n";
      if (a.gamma_target) out << "gamma_target = " << fmt(*a.gamma_target) << "\n";
      out << "kmax = " << a.kmax << "\n";
      if (!a.base.empty()) out << "base = " << fmt_list(a.base) << "\n";
      out << "base_t = " << fmt(a.base_t) << "\n";
      out << "expect_min = " << fmt(a.expect_min) << "\n";
      out << "expect_max = " << fmt(a.expect_max) << "\n";
    } else if (a.check == "dyadic") {
      out << "source = \"" << a.source << "\"\n";
    } else if (a.check == "class_membership") {
      out << "m = " << a.m << "\n";
      out << "m1 = " << fmt(a.m1) << "\n";
      out << "m2 = " << fmt(a.m2) << "\n";
      out << "m3 = " << fmt(a.m3) << "\n";
      if (a.m4) out << "m4 = " << fmt(*a.m4) << "\n";
    } else if (a.check == "rescaling") {
      out << "r_values = " << fmt_list(a.r_values) << "\n";
      out << "h = " << fmt(a.h) << "\n";
      if (a.threshold) out << "threshold = " << fmt(*a.threshold) << "\n";
      out << "test_field = \"" << a.test_field << "\"\n";
    } else if (a.check == "oracle") {
      out << "oracle = \"" << a.oracle << "\"\n";
      if (a.threshold) out << "threshold = " << fmt(*a.threshold) << "\n";
    } else if (a.check == "comparison") {
      out << "trials = " << a.trials << "\n";
      out << "bump = " << fmt(a.bump) << "\n";
    } else if (a.check == "sobolev") {
      if (a.threshold) out << "threshold = " << fmt(*a.threshold) << "\n";
    }
  }
  return out.str();
}

bool Scenario::operator==(const Scenario& other) const {
  return render(*this) == render(other);
}

// ---- materialization ---------------------------------------------------

ScenarioSetup materialize(const Scenario& s) {
  ScenarioSetup setup;
  setup.group = (s.group.name == "heisenberg") ? heisenberg_group()
                                               : euclidean_group(s.group.dim);
  const GroupSpec& spec = setup.group;
  const int n = spec.n, q = spec.q;

  if (static_cast<int>(s.grid.box_lo.size()) != n ||
      static_cast<int>(s.grid.box_hi.size()) != n ||
      static_cast<int>(s.grid.nx.size()) != n)
    throw ConfigError("grid box/nx dimension does not match group dimension " +
                          std::to_string(n),
                      0, "grid.nx");

  ProblemSpec& p = setup.problem;
  p.group = spec;
  p.box = {s.grid.box_lo, s.grid.box_hi};
  p.t0 = s.grid.t0;
  p.t1 = s.grid.t1;
  p.ellipticity = s.problem.lambda;
  p.alpha = s.problem.alpha;

  if (s.problem.a == "identity") {
    p.a = identity_coefficients(q);
  } else {
    if (static_cast<int>(s.problem.a_values.size()) != q)
      throw ConfigError("a_values must have q = " + std::to_string(q) + " entries", 0,
                        "problem.a_values");
    p.a = diagonal_coefficients(s.problem.a_values);
  }
  if (s.problem.b == "zero") {
    p.b = zero_drift(q);
  } else {
    if (static_cast<int>(s.problem.b_values.size()) != q)
      throw ConfigError("b_values must have q = " + std::to_string(q) + " entries", 0,
                        "problem.b_values");
    p.b = constant_drift(s.problem.b_values);
  }

  if (s.problem.f == "zero") p.f = constant_field(0.0);
  else p.f = constant_field(s.problem.f_value);

  if (s.problem.g == "zero") {
    p.g = constant_field(0.0);
  } else if (s.problem.g == "const") {
    p.g = constant_field(s.problem.g_value);
  } else if (s.problem.g == "sine-initial") {
    const Box box = p.box;
    p.g = {[box](const Point& x, double) {
             double v = 1.0;
             for (int j = 0; j < box.dim(); ++j)
               v *= std::sin(M_PI * (x[j] - box.lo[j]) / (box.hi[j] - box.lo[j]));
             return v;
           },
           Smoothness::analytic};
  } else {  // cusp-c1alpha: amplitude * |x^{(1)}|^{1+alpha}, exactly C^{1,alpha}
    const double amp = s.problem.g_amplitude, ga = s.problem.g_alpha;
    p.g = {[amp, ga, q](const Point& x, double) {
             double s2 = 0.0;
             for (int i = 0; i < q; ++i) s2 += x[i] * x[i];
             return amp * std::pow(s2, 0.5 * (1.0 + ga));
           },
           Smoothness::analytic};
  }

  p.has_obstacle = (s.problem.kind == "obstacle");
  if (!p.has_obstacle || s.problem.phi == "none") {
    p.phi = constant_field(-1e300);
    p.has_obstacle = false;
  } else if (s.problem.phi == "const") {
    p.phi = constant_field(s.problem.phi_value);
  } else if (s.problem.phi == "neg-holder-cusp") {
    Point base = s.problem.phi_base.empty() ? Point(n, 0.0) : s.problem.phi_base;
    if (static_cast<int>(base.size()) != n)
      throw ConfigError("phi_base dimension mismatch", 0, "problem.phi_base");
    const double amp = s.problem.phi_amplitude, pa = s.problem.phi_alpha,
                 bt = s.problem.phi_base_t;
    const GroupSpec g = spec;
    p.phi = {[amp, pa, base, bt, g](const Point& x, double t) {
               const double d = parabolic_quasi_distance(g, {x, t}, {base, bt});
               return -amp * std::pow(d, pa);
             },
             Smoothness::analytic};
  } else {  // neg-paraboloid on the first layer
    const double amp = s.problem.phi_amplitude, off = s.problem.phi_offset;
    p.phi = {[amp, off, q](const Point& x, double) {
               double s2 = 0.0;
               for (int i = 0; i < q; ++i) s2 += x[i] * x[i];
               return -amp * s2 - off;
             },
             Smoothness::analytic};
  }

  setup.grid = build_grid(p.box, s.grid.t0, s.grid.t1, s.grid.nx, s.grid.nt);

  setup.solve_options.tol = s.solver.tol;
  setup.solve_options.max_iter = s.solver.max_iter;
  setup.solve_options.sweep =
      (s.solver.sweep == "redblack") ? SweepOrder::redblack : SweepOrder::lex;
  setup.solve_options.workers = s.solver.workers;
  return setup;
}

// ---- runner -------------------------------------------------------------

namespace {

ScalarField oracle_field(const std::string& name, const ScenarioSetup& setup) {
  if (name == "heat1d-sine") {
    const Box box = setup.problem.box;
    const double t0 = setup.problem.t0;
    const double L = box.hi[0] - box.lo[0];
    return {[box, t0, L](const Point& x, double t) {
              return std::exp(-M_PI * M_PI * (t - t0) / (L * L)) *
                     std::sin(M_PI * (x[0] - box.lo[0]) / L);
            },
            Smoothness::analytic};
  }
  throw std::invalid_argument("unknown oracle '" + name + "'");
}

ScalarField test_field(const std::string& name, const GroupSpec& spec) {
  if (name == "quadratic-first-layer") {
    const int q = spec.q;
    return {[q](const Point& x, double) {
              double s2 = 0.0;
              for (int i = 0; i < q; ++i) s2 += x[i] * x[i];
              return s2;
            },
            Smoothness::analytic};
  }
  if (name == "heat-quadratic") {
    const int q = spec.q;
    return {[q](const Point& x, double t) {
              double s2 = 0.0;
              for (int i = 0; i < q; ++i) s2 += x[i] * x[i];
              return s2 + 2.0 * q * t;
            },
            Smoothness::analytic};
  }
  throw std::invalid_argument("unknown test field '" + name + "'");
}

std::string grid_desc(const Grid& g) {
  std::string out = "nx=";
  for (std::size_t i = 0; i < g.nx.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(g.nx[i]);
  }
  out += " nt=" + std::to_string(g.nt);
  return out;
}

}  // namespace

Report run_scenario(const Scenario& s) {
  Report rep;
  rep.scenario_id = s.id;
  rep.seed = s.seed;
  {
    const std::string canon = render(s);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canon.data(), canon.size())));
    rep.config_hash = buf;
  }

  ScenarioSetup setup = materialize(s);
  rep.grid_desc = grid_desc(setup.grid);
  const ProblemSpec& p = setup.problem;
  const Grid& grid = setup.grid;

  SolveResult solved;
  try {
    solved = p.has_obstacle ? solve_obstacle(p, grid, setup.solve_options)
                            : solve_cauchy_dirichlet(p, grid, setup.solve_options);
    rep.solver_ok = solved.diag.converged;
    rep.diagnostics = solved.diag;
    rep.checks.push_back({"solve", "solve", solved.diag.converged ? "pass" : "fail",
                          solved.diag.worst_residual, setup.solve_options.tol,
                          solved.diag.converged
                              ? ""
                              : "iteration cap at level " +
                                    std::to_string(solved.diag.failed_level)});
  } catch (const std::exception& e) {
    rep.solver_ok = false;
    rep.checks.push_back({"solve", "solve", "fail", 0.0, 0.0, e.what()});
  }

  if (rep.solver_ok && p.has_obstacle) {
    const double comp = complementarity_residual(p, grid, solved.u);
    rep.checks.push_back({"complementarity", "complementarity",
                          comp < 10.0 * setup.solve_options.tol ? "pass" : "fail", comp,
                          10.0 * setup.solve_options.tol, ""});
    double worst_gap = 0.0;
    const long ns = grid.spatial_nodes();
    for (int m = 0; m < grid.levels(); ++m) {
      const double t = grid.time(m);
      for (long i = 0; i < ns; ++i)
        worst_gap = std::min(worst_gap, solved.u.at(m, i) - p.phi(grid.coords(i), t));
    }
    rep.checks.push_back({"obstacle-bound", "obstacle-bound",
                          worst_gap >= -1e-12 ? "pass" : "fail", worst_gap, -1e-12, ""});
  }

  for (const auto& a : s.analyses) {
    if (!rep.solver_ok) {
      rep.checks.push_back({a.name, a.check, "skipped", 0.0, 0.0, "solver failed"});
      continue;
    }
    try {
      if (a.check == "decay") {
        const ScalarField& data = (a.anchor == "obstacle") ? p.phi : p.g;
        const double alpha = a.alpha ? *a.alpha : p.alpha;
        const double gamma = a.gamma_target ? *a.gamma_target : gamma_for(a.m, alpha);
        SpaceTimePoint base{a.base.empty() ? Point(p.group.n, 0.0) : a.base, a.base_t};
        ScalarField F = data;
        if (a.f_mode == "p0") F = taylor_p(0, data, base, p.group);
        else if (a.f_mode == "p1") F = taylor_p(1, data, base, p.group);
        const CylinderKind kind =
            (a.kind == "past") ? CylinderKind::past : CylinderKind::future;
        DecaySequence seq =
            decay_sequence(solved.u, F, base, kind, a.kmax, p.group, gamma);
        const double fitted = fit_exponent(seq, 1, a.kmax);
        const bool inside = fitted >= a.expect_min && fitted <= a.expect_max;
        rep.checks.push_back({a.name, a.check,
                              inside ? (seq.truncated ? "warn" : "pass") : "fail", fitted,
                              a.expect_min, seq.warning});
        rep.sequences.emplace_back(a.name, std::move(seq));
      } else if (a.check == "dyadic") {
        const DecaySequence* src = nullptr;
        for (const auto& [name, seq] : rep.sequences)
          if (name == a.source) src = &seq;
        if (!src) {
          rep.checks.push_back({a.name, a.check, "skipped", 0.0, 0.0,
                                "source sequence unavailable"});
          continue;
        }
        const double c = envelope_constant(*src, src->gamma_target);
        const DyadicResult dy = check_dyadic(*src, src->gamma_target, c);
        rep.checks.push_back({a.name, a.check, dy.ok ? "pass" : "fail", dy.worst_excess,
                              1.0,
                              dy.ok ? "envelope c=" + fmt(c)
                                    : "violated at k=" + std::to_string(dy.worst_k)});
      } else if (a.check == "class_membership") {
        ClassBounds bounds{a.m1, a.m2, a.m3, a.m4};
        const ClassReport cr = class_membership(p, solved.u, a.m, bounds);
        for (const auto& c : cr.checks)
          rep.checks.push_back({a.name + "." + c.bound, a.check,
                                c.pass ? "pass" : "fail", c.measured, c.limit, ""});
      } else if (a.check == "rescaling") {
        const ScalarField u = test_field(a.test_field, p.group);
        SpaceTimeBox region;
        region.space.lo.resize(p.group.n);
        region.space.hi.resize(p.group.n);
        for (int j = 0; j < p.group.n; ++j) {
          region.space.lo[j] = 0.5 * p.box.lo[j];
          region.space.hi[j] = 0.5 * p.box.hi[j];
        }
        region.t0 = p.t0 + 0.25 * (p.t1 - p.t0);
        region.t1 = p.t0 + 0.75 * (p.t1 - p.t0);
        double worst = 0.0;
        for (double r : a.r_values.empty() ? std::vector<double>{0.25, 0.5, 1.0}
                                           : a.r_values)
          worst = std::max(worst, verify_rescaling_identity(
                                      p, u, r, {Point(p.group.n, 0.0), 0.0}, a.h, region));
        const double limit = a.threshold.value_or(1e-4);
        rep.checks.push_back(
            {a.name, a.check, worst < limit ? "pass" : "fail", worst, limit, ""});
      } else if (a.check == "oracle") {
        const ScalarField exact = oracle_field(a.oracle, setup);
        double err = 0.0;
        const long ns = grid.spatial_nodes();
        for (long i = 0; i < ns; ++i)
          err = std::max(err, std::abs(solved.u.at(grid.nt, i) -
                                       exact(grid.coords(i), grid.time(grid.nt))));
        const double limit = *a.threshold;
        rep.checks.push_back(
            {a.name, a.check, err < limit ? "pass" : "fail", err, limit, ""});
      } else if (a.check == "comparison") {
        const CounterRng rng(s.seed, fnv1a("coefficient-noise", 17));
        double worst = 0.0;
        for (int trial = 0; trial < a.trials; ++trial) {
          const double eps = a.bump * (0.5 + rng.uniform(trial));
          ProblemSpec p2 = p;
          p2.g = {[g = p.g, eps](const Point& x, double t) { return g(x, t) + eps; },
                  p.g.tag};
          p2.f = {[f = p.f, eps](const Point& x, double t) { return f(x, t) - eps; },
                  p.f.tag};
          const SolveResult r2 = p.has_obstacle
                                     ? solve_obstacle(p2, grid, setup.solve_options)
                                     : solve_cauchy_dirichlet(p2, grid, setup.solve_options);
          if (!r2.diag.converged)
            throw std::runtime_error("comparison trial solve did not converge");
          for (std::size_t i = 0; i < solved.u.values.size(); ++i)
            worst = std::max(worst, solved.u.values[i] - r2.u.values[i]);
        }
        rep.checks.push_back({a.name, a.check, worst <= 1e-10 ? "pass" : "fail", worst,
                              1e-10, ""});
      } else if (a.check == "sobolev") {
        SpaceTimeBox region;
        region.space.lo.resize(p.group.n);
        region.space.hi.resize(p.group.n);
        double hmin = 1e300;
        for (int j = 0; j < p.group.n; ++j) {
          const double w = p.box.hi[j] - p.box.lo[j];
          region.space.lo[j] = p.box.lo[j] + 0.25 * w;
          region.space.hi[j] = p.box.hi[j] - 0.25 * w;
          hmin = std::min(hmin, grid.spacing(j));
        }
        region.t0 = p.t0 + 0.25 * (p.t1 - p.t0);
        region.t1 = p.t1;
        const double est =
            sobolev_sup_estimate(interpolate(solved.u), p, region, 1.5 * hmin, 5);
        const double limit = a.threshold.value_or(1e9);
        rep.checks.push_back({a.name, a.check,
                              std::isfinite(est) && est < limit ? "pass" : "fail", est,
                              limit, ""});
      }
    } catch (const std::exception& e) {
      rep.checks.push_back({a.name, a.check, "fail", 0.0, 0.0, e.what()});
    }
  }
  return rep;
}

// ---- emission -----------------------------------------------------------

void emit_report(const Report& r, ReportFormat format, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  if (format == ReportFormat::csv) {
    {
      std::ofstream out(fs::path(dir) / (r.scenario_id + "_checks.csv"));
      if (!out) throw std::runtime_error("emit_report: cannot write checks csv");
      out << "scenario_id,check,status,measured,bound\n";
      for (const auto& c : r.checks)
        out << r.scenario_id << ',' << c.name << ',' << c.status << ',' << fmt(c.measured)
            << ',' << fmt(c.bound) << "\n";
    }
    {
      std::ofstream out(fs::path(dir) / (r.scenario_id + "_decay.csv"));
      if (!out) throw std::runtime_error("emit_report: cannot write decay csv");
      out << "scenario_id,kind,k,s_k,gamma_target,gamma_fitted,c_envelope\n";
      for (const auto& [name, seq] : r.sequences) {
        const double c_env = envelope_constant(seq, seq.gamma_target);
        for (const auto& e : seq.entries)
          out << r.scenario_id << ',' << (seq.kind == CylinderKind::past ? "past" : "future")
              << ',' << e.k << ',' << fmt(e.s) << ',' << fmt(seq.gamma_target) << ','
              << fmt(seq.gamma_fitted.value_or(0.0)) << ',' << fmt(c_env) << "\n";
      }
    }
    return;
  }

  nlohmann::json j;
  j["scenario_id"] = r.scenario_id;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["grid"] = r.grid_desc;
  j["solver"] = {{"converged", r.solver_ok},
                 {"total_iterations", r.diagnostics.total_iterations},
                 {"worst_residual", r.diagnostics.worst_residual},
                 {"failed_level", r.diagnostics.failed_level}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name},
                           {"check", c.check},
                           {"status", c.status},
                           {"measured", c.measured},
                           {"bound", c.bound},
                           {"note", c.note}});
  j["sequences"] = nlohmann::json::array();
  for (const auto& [name, seq] : r.sequences) {
    nlohmann::json js;
    js["name"] = name;
    js["kind"] = seq.kind == CylinderKind::past ? "past" : "future";
    js["gamma_target"] = seq.gamma_target;
    if (seq.gamma_fitted) js["gamma_fitted"] = *seq.gamma_fitted;
    js["truncated"] = seq.truncated;
    js["entries"] = nlohmann::json::array();
    for (const auto& e : seq.entries)
      js["entries"].push_back({{"k", e.k}, {"s", e.s}, {"nodes", e.nodes}});
    j["sequences"].push_back(js);
  }
  std::ofstream out(std::filesystem::path(dir) / (r.scenario_id + ".json"));
  if (!out) throw std::runtime_error("emit_report: cannot write json summary");
  out << j.dump(2) << "\n";
}

}  // namespace carnot
