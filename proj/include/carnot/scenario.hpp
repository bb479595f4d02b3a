#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carnot/regularity.hpp"

namespace carnot {

struct ConfigError : std::runtime_error {
  int line = 0;          // 0 when the error is semantic rather than syntactic
  std::string field;     // dotted path, e.g. "analysis.alpha"
  ConfigError(std::string msg, int line_ = 0, std::string field_ = "")
      : std::runtime_error(std::move(msg)), line(line_), field(std::move(field_)) {}
};

struct GroupConfig {
  std::string name = "euclidean";
  int dim = 1;  // euclidean only
};

struct ProblemConfig {
  std::string kind = "obstacle";  // "cauchy" | "obstacle"
  std::string a = "identity";
  std::vector<double> a_values;
  std::string b = "zero";
  std::vector<double> b_values;
  std::string f = "zero";
  double f_value = 0.0;
  std::string g = "zero";
  double g_value = 0.0;
  double g_alpha = 0.5;
  double g_amplitude = 1.0;
  std::string phi = "none";
  double phi_value = 0.0;
  double phi_alpha = 0.5;
  double phi_amplitude = 1.0;
  double phi_offset = 0.0;
  std::vector<double> phi_base;
  double phi_base_t = 0.0;
  double lambda = 1.0;
  double alpha = 0.5;
};

struct GridConfig {
  std::vector<double> box_lo, box_hi;
  std::vector<int> nx;
  double t0 = 0.0, t1 = 1.0;
  int nt = 8;
};

struct SolverConfig {
  double tol = 1e-9;
  long max_iter = 50000;
  std::string sweep = "lex";
  int workers = 1;
};

struct AnalysisConfig {
  std::string name;                 // unique per scenario; defaults to check<k>
  std::string check;                // decay | dyadic | class_membership | rescaling |
                                    // oracle | comparison | sobolev
  // decay
  std::string kind = "past";        // past | future
  std::string anchor = "obstacle";  // obstacle | boundary
  int m = 0;                        // data-class case; gamma_target = m + alpha (or 2)
  std::optional<double> alpha;      // defaults to problem.alpha
  std::string f_mode = "raw";       // raw | p0 | p1
  std::optional<double> gamma_target;
  int kmax = 5;
  std::vector<double> base;
  double base_t = 0.0;
  double expect_min = -1e300;
  double expect_max = 1e300;
  // dyadic
  std::string source;
  // class_membership
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  std::optional<double> m4;
  // rescaling / oracle / sobolev
  std::vector<double> r_values;
  double h = 1e-3;
  std::optional<double> threshold;  // defaults: rescaling 1e-4, sobolev 1e9
  std::string test_field = "quadratic-first-layer";
  // oracle
  std::string oracle;
  // comparison
  int trials = 2;
  double bump = 0.05;
};

struct Scenario {
  std::string id;
  std::uint64_t seed = 1;
  GroupConfig group;
  ProblemConfig problem;
  GridConfig grid;
  SolverConfig solver;
  std::vector<AnalysisConfig> analyses;

  bool operator==(const Scenario& other) const;
};

Scenario parse_config(const std::string& text);
std::string render(const Scenario& s);

struct CheckResult {
  std::string name;
  std::string check;
  std::string status;  // pass | fail | warn | skipped
  double measured = 0.0;
  double bound = 0.0;
  std::string note;
};

struct Report {
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string grid_desc;
  bool solver_ok = false;
  SolveDiagnostics diagnostics;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, DecaySequence>> sequences;  // check name -> sequence

  bool all_pass() const {
    for (const auto& c : checks)
      if (c.status == "fail" || c.status == "skipped") return false;
    return true;
  }
};

// Builds the group, problem and grid from the scenario, runs the solver and
// then every analysis.  A solver hard failure marks dependent checks
// "skipped"; individual analysis failures never abort the remaining checks.
Report run_scenario(const Scenario& s);

enum class ReportFormat { csv, json_summary };

// csv writes <id>_checks.csv and <id>_decay.csv into `dir`; json_summary
// writes <id>.json.  Output is byte-stable for identical reports.
void emit_report(const Report& r, ReportFormat format, const std::string& dir);

std::vector<std::string> builtin_scenario_ids();
std::string builtin_scenario_text(const std::string& id);
Scenario builtin_scenario(const std::string& id);

// Materialized pieces of a scenario, exposed for tests and the bindings.
struct ScenarioSetup {
  GroupSpec group;
  ProblemSpec problem;
  Grid grid;
  SolveOptions solve_options;
};
ScenarioSetup materialize(const Scenario& s);

}  // namespace carnot
