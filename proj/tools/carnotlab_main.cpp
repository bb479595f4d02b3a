#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "carnot/scenario.hpp"

namespace {

carnot::Scenario load(const std::string& arg) {
  for (const auto& id : carnot::builtin_scenario_ids())
    if (id == arg) return carnot::builtin_scenario(id);
  std::ifstream in(arg);
  if (!in) throw carnot::ConfigError("cannot open config file or built-in id '" + arg + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return carnot::parse_config(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Obstacle-problem laboratory for parabolic operators on Carnot groups"};
  app.require_subcommand(1);

  std::string config, out_dir = ".", format = "csv";
  long seed = -1;
  int workers = 1;
  bool dump_solution = false;

  auto* run = app.add_subcommand("run", "run a scenario and emit reports");
  run->add_option("config", config, "config path or built-in scenario id")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--workers", workers, "workers for colored sweeps");
  run->add_flag("--dump-solution", dump_solution, "write a COSV1 checkpoint next to reports");

  auto* list = app.add_subcommand("list-scenarios", "list built-in scenarios");

  std::string vconfig;
  auto* validate = app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("config", vconfig, "config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list->parsed()) {
      for (const auto& id : carnot::builtin_scenario_ids()) std::cout << id << "\n";
      return 0;
    }
    if (validate->parsed()) {
      std::ifstream in(vconfig);
      if (!in) {
        std::cerr << "error: cannot open " << vconfig << "\n";
        return 1;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      carnot::parse_config(ss.str());
      std::cout << "OK\n";
      return 0;
    }

    carnot::Scenario s = load(config);
    if (seed >= 0) s.seed = static_cast<std::uint64_t>(seed);
    if (workers > 1) {
      s.solver.workers = workers;
      s.solver.sweep = "redblack";
    }

    const carnot::Report rep = carnot::run_scenario(s);
    carnot::emit_report(rep,
                        format == "csv" ? carnot::ReportFormat::csv
                                        : carnot::ReportFormat::json_summary,
                        out_dir);
    if (dump_solution) {
      carnot::ScenarioSetup setup = carnot::materialize(s);
      const carnot::SolveResult solved =
          setup.problem.has_obstacle
              ? carnot::solve_obstacle(setup.problem, setup.grid, setup.solve_options)
              : carnot::solve_cauchy_dirichlet(setup.problem, setup.grid,
                                               setup.solve_options);
      carnot::save_checkpoint(out_dir + "/" + s.id + ".cosv1", solved.u);
    }

    for (const auto& c : rep.checks)
      std::cout << c.status << "  " << c.name << "  measured=" << c.measured
                << (c.note.empty() ? "" : "  (" + c.note + ")") << "\n";
    return rep.all_pass() ? 0 : 2;
  } catch (const carnot::ConfigError& e) {
    std::cerr << "config error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    if (!e.field.empty()) std::cerr << " [" << e.field << "]";
    std::cerr << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
