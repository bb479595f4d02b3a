#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carnot/scenario.hpp"

namespace py = pybind11;
using namespace carnot;

namespace {

ScalarField wrap_field(const std::function<double(std::vector<double>, double)>& fn) {
  return {[fn](const Point& x, double t) { return fn(x, t); }, Smoothness::analytic};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parabolic obstacle problems on homogeneous Carnot groups";

  py::class_<SpaceTimePoint>(m, "SpaceTimePoint")
      .def(py::init([](std::vector<double> x, double t) {
             return SpaceTimePoint{std::move(x), t};
           }),
           py::arg("x"), py::arg("t") = 0.0)
      .def_readwrite("x", &SpaceTimePoint::x)
      .def_readwrite("t", &SpaceTimePoint::t);

  py::class_<GroupSpec>(m, "GroupSpec")
      .def_readonly("name", &GroupSpec::name)
      .def_readonly("n", &GroupSpec::n)
      .def_readonly("q", &GroupSpec::q)
      .def_readonly("layer_dims", &GroupSpec::layer_dims)
      .def_readonly("sigma", &GroupSpec::sigma)
      .def("step", &GroupSpec::step);

  m.def("euclidean_group", &euclidean_group, py::arg("n"));
  m.def("heisenberg_group", &heisenberg_group);

  m.def("compose", &compose);
  m.def("invert", &invert);
  m.def("dilate", &dilate);
  m.def("dilate_st", &dilate_st);
  m.def("compose_st", &compose_st);
  m.def("hom_norm", &hom_norm);
  m.def("hom_norm_st", &hom_norm_st);
  m.def("homogeneous_dimension", &homogeneous_dimension);
  m.def("flow", &flow, py::arg("spec"), py::arg("field_index"), py::arg("h"), py::arg("x"));

  m.def("quasi_distance", &quasi_distance);
  m.def("parabolic_quasi_distance", &parabolic_quasi_distance);
  m.def("cc_distance_upper", &cc_distance_upper, py::arg("spec"), py::arg("x"), py::arg("y"),
        py::arg("budget") = 4);
  m.def("ball_volume_mc", &ball_volume_mc, py::arg("spec"), py::arg("r"), py::arg("samples"),
        py::arg("seed"));
  m.def("volume_growth_exponent", &volume_growth_exponent);
  m.def("hormander_rank", &hormander_rank, py::arg("spec"), py::arg("x"),
        py::arg("max_step") = 2, py::arg("tol") = 1e-8);

  m.def(
      "xdiff",
      [](const GroupSpec& spec, const std::function<double(std::vector<double>, double)>& u,
         int i, const SpaceTimePoint& z, double h) {
        return xdiff(spec, wrap_field(u), i, z, h);
      },
      py::arg("spec"), py::arg("u"), py::arg("i"), py::arg("z"), py::arg("h") = 1e-5);
  m.def(
      "xxdiff",
      [](const GroupSpec& spec, const std::function<double(std::vector<double>, double)>& u,
         int i, int j, const SpaceTimePoint& z, double h) {
        return xxdiff(spec, wrap_field(u), i, j, z, h);
      },
      py::arg("spec"), py::arg("u"), py::arg("i"), py::arg("j"), py::arg("z"),
      py::arg("h") = 1e-3);

  m.def(
      "fit_exponent",
      [](const std::vector<std::pair<int, double>>& entries, int k_min, int k_max) {
        DecaySequence seq;
        for (const auto& [k, s] : entries) seq.entries.push_back({k, s, 1});
        return fit_exponent(seq, k_min, k_max);
      },
      py::arg("entries"), py::arg("k_min") = 1, py::arg("k_max") = 5);
  m.def(
      "check_dyadic",
      [](const std::vector<std::pair<int, double>>& entries, double gamma, double c) {
        DecaySequence seq;
        for (const auto& [k, s] : entries) seq.entries.push_back({k, s, 1});
        const DyadicResult r = check_dyadic(seq, gamma, c);
        return py::make_tuple(r.ok, r.worst_k);
      },
      py::arg("entries"), py::arg("gamma"), py::arg("c"));

  m.def("list_scenarios", &builtin_scenario_ids);
  m.def("builtin_scenario_text", &builtin_scenario_text);

  m.def(
      "run_scenario_json",
      [](const std::string& id_or_text, long seed) {
        Scenario s;
        bool matched = false;
        for (const auto& id : builtin_scenario_ids())
          if (id == id_or_text) {
            s = builtin_scenario(id);
            matched = true;
          }
        if (!matched) s = parse_config(id_or_text);
        if (seed >= 0) s.seed = static_cast<std::uint64_t>(seed);
        const Report rep = run_scenario(s);
        py::dict out;
        out["scenario_id"] = rep.scenario_id;
        out["config_hash"] = rep.config_hash;
        out["solver_ok"] = rep.solver_ok;
        out["all_pass"] = rep.all_pass();
        py::list checks;
        for (const auto& c : rep.checks) {
          py::dict d;
          d["name"] = c.name;
          d["check"] = c.check;
          d["status"] = c.status;
          d["measured"] = c.measured;
          d["bound"] = c.bound;
          d["note"] = c.note;
          checks.append(d);
        }
        out["checks"] = checks;
        py::list seqs;
        for (const auto& [name, seq] : rep.sequences) {
          py::dict d;
          d["name"] = name;
          d["kind"] = seq.kind == CylinderKind::past ? "past" : "future";
          d["gamma_target"] = seq.gamma_target;
          d["gamma_fitted"] = seq.gamma_fitted ? py::cast(*seq.gamma_fitted) : py::none();
          py::list entries;
          for (const auto& e : seq.entries) entries.append(py::make_tuple(e.k, e.s));
          d["entries"] = entries;
          seqs.append(d);
        }
        out["sequences"] = seqs;
        return out;
      },
      py::arg("id_or_text"), py::arg("seed") = -1,
      "Run a built-in scenario id or a raw config text; returns the report as a dict.");

  m.def(
      "solve_heat_1d",
      [](int nx, int nt, double t1) {
        Scenario s = builtin_scenario("euclid-heat-1d");
        s.grid.nx = {nx};
        s.grid.nt = nt;
        s.grid.t1 = t1;
        ScenarioSetup setup = materialize(s);
        const SolveResult r = solve_cauchy_dirichlet(setup.problem, setup.grid,
                                                     setup.solve_options);
        std::vector<double> final_slice(r.u.slice(setup.grid.nt),
                                        r.u.slice(setup.grid.nt) + nx);
        return py::make_tuple(r.diag.converged, final_slice);
      },
      py::arg("nx") = 64, py::arg("nt") = 256, py::arg("t1") = 0.1);
}
