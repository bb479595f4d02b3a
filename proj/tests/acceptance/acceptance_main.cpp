// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances and runtime budgets are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "carnot/scenario.hpp"

using namespace carnot;

namespace {

int failures = 0;

class Criterion {
 public:
  Criterion(int id, std::string title, double budget_seconds)
      : id_(id), title_(std::move(title)), budget_(budget_seconds),
        start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string& what) {
    if (!ok) notes_ += (notes_.empty() ? "" : "; ") + what;
    ok_ = ok_ && ok;
  }
  template <typename T>
  void check_range(T value, T lo, T hi, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s=%.6g not in [%.3g, %.3g]", what.c_str(),
                  static_cast<double>(value), static_cast<double>(lo),
                  static_cast<double>(hi));
    check(value >= lo && value <= hi, buf);
  }

  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (secs > budget_) {
      ok_ = false;
      notes_ += (notes_.empty() ? "" : "; ") + std::string("over runtime budget");
    }
    std::printf("[%s] C%-2d %-44s (%.1fs/%.0fs)%s%s\n", ok_ ? "PASS" : "FAIL", id_,
                title_.c_str(), secs, budget_, notes_.empty() ? "" : " -- ",
                notes_.c_str());
    std::fflush(stdout);
    if (!ok_) ++failures;
  }

 private:
  int id_;
  std::string title_;
  double budget_;
  bool ok_ = true;
  std::string notes_;
  std::chrono::steady_clock::time_point start_;
};

Point random_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Point p(n);
  for (auto& v : p) v = dist(rng);
  return p;
}

double max_diff(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

const DecaySequence* find_sequence(const Report& rep, const std::string& name) {
  for (const auto& [n, seq] : rep.sequences)
    if (n == name) return &seq;
  return nullptr;
}

const CheckResult* find_check(const Report& rep, const std::string& name) {
  for (const auto& c : rep.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

int main() {
  std::vector<GroupSpec> instances = {euclidean_group(1), euclidean_group(2),
                                      euclidean_group(3), heisenberg_group()};

  {  // C1: group and metric structure at tight tolerances
    Criterion c(1, "group axioms, dilations, norms, flows", 10.0);
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> lam(0.1, 10.0);
    for (const GroupSpec& spec : instances) {
      double assoc = 0, ident = 0, inv = 0, autom = 0, homog = 0, rev = 0;
      for (int s = 0; s < 1000; ++s) {
        const Point a = random_point(rng, spec.n);
        const Point b = random_point(rng, spec.n);
        const Point cc = random_point(rng, spec.n);
        const double l = lam(rng);
        assoc = std::max(assoc, max_diff(compose(spec, compose(spec, a, b), cc),
                                         compose(spec, a, compose(spec, b, cc))));
        const Point zero(spec.n, 0.0);
        ident = std::max(ident, max_diff(compose(spec, a, zero), a));
        inv = std::max(inv, max_diff(compose(spec, a, invert(spec, a)), zero));
        autom = std::max(autom,
                         max_diff(dilate(spec, l, compose(spec, a, b)),
                                  compose(spec, dilate(spec, l, a), dilate(spec, l, b))));
        const double nrm = hom_norm(spec, a);
        if (nrm > 1e-6)
          homog = std::max(homog,
                           std::abs(hom_norm(spec, dilate(spec, l, a)) - l * nrm) / (l * nrm));
        if (s < 200) {
          const double hstep = -1.0 + 2.0 * (s / 200.0);
          const int i = static_cast<int>(rng() % spec.q);
          rev = std::max(rev, max_diff(flow(spec, i, -hstep, flow(spec, i, hstep, a)), a));
        }
      }
      c.check(assoc < 1e-12, spec.name + " associativity");
      c.check(ident < 1e-14, spec.name + " identity");
      c.check(inv < 1e-14, spec.name + " inverse");
      c.check(autom < 1e-12, spec.name + " dilation automorphism");
      c.check(homog < 1e-12, spec.name + " norm homogeneity");
      c.check(rev < 1e-10, spec.name + " flow reversibility");
    }
  }

  {  // C2: volume-doubling exponents from Monte Carlo volumes
    Criterion c(2, "homogeneous dimension via MC volumes", 30.0);
    const GroupSpec h = heisenberg_group();
    const double v1 = ball_volume_mc(h, 1.0, 1000000, 202);
    const double v2 = ball_volume_mc(h, 2.0, 1000000, 203);
    c.check_range(std::log2(v2 / v1), 3.9, 4.1, "heisenberg exponent");
    for (int n = 1; n <= 3; ++n) {
      const GroupSpec e = euclidean_group(n);
      const double w1 = ball_volume_mc(e, 1.0, 1000000, 204 + n);
      const double w2 = ball_volume_mc(e, 2.0, 1000000, 208 + n);
      c.check_range(std::log2(w2 / w1), n - 0.05, n + 0.05,
                    "euclidean(" + std::to_string(n) + ") exponent");
    }
  }

  {  // C3: Hormander rank from numerical brackets
    Criterion c(3, "bracket generation rank on heisenberg", 5.0);
    const GroupSpec h = heisenberg_group();
    std::mt19937_64 rng(303);
    for (int s = 0; s < 20; ++s) {
      const Point x = random_point(rng, 3);
      c.check(hormander_rank(h, x, 2, 1e-8) == 3, "rank at a sampled point");
    }
  }

  {  // C4: blow-up rescaling identity
    Criterion c(4, "rescaling identity H_r u^r = r^2 (Hu)^r", 10.0);
    ProblemSpec p;
    p.group = heisenberg_group();
    p.a = identity_coefficients(2);
    p.b = zero_drift(2);
    p.f = constant_field(0.0);
    p.g = constant_field(0.0);
    p.phi = constant_field(-1.0);
    p.has_obstacle = false;
    p.box = {{-1, -1, -1}, {1, 1, 1}};
    p.t0 = 0.0;
    p.t1 = 1.0;
    const ScalarField u{[](const Point& x, double) { return x[0] * x[0] + x[1] * x[1]; },
                        Smoothness::analytic};
    const SpaceTimeBox region{{{-0.4, -0.4, -0.4}, {0.4, 0.4, 0.4}}, 0.1, 0.3};
    for (double r : {0.25, 0.5, 1.0}) {
      const double res =
          verify_rescaling_identity(p, u, r, {{0, 0, 0}, 0.0}, 1e-3, region);
      c.check(res < 1e-4, "residual at r=" + std::to_string(r));
    }
  }

  {  // C5: heat-equation oracle and refinement
    Criterion c(5, "1d heat vs separation of variables", 30.0);
    Scenario s = builtin_scenario("euclid-heat-1d");
    const Report rep = run_scenario(s);
    const CheckResult* oracle = find_check(rep, "oracle-error");
    c.check(rep.solver_ok, "solver converged");
    c.check(oracle && oracle->status == "pass" && oracle->measured < 1e-2,
            "oracle error < 1e-2");

    Scenario fine = s;
    fine.grid.nx = {128};
    fine.grid.nt = 512;
    const Report rep2 = run_scenario(fine);
    const CheckResult* oracle2 = find_check(rep2, "oracle-error");
    if (oracle && oracle2 && oracle2->measured > 0.0)
      c.check_range(oracle->measured / oracle2->measured, 1.6, 2.6, "refinement factor");
    else
      c.check(false, "refinement data missing");
  }

  {  // C6: complementarity, obstacle bound, comparison, penalization
    Criterion c(6, "obstacle solver certification", 120.0);
    ProblemSpec p;
    p.group = euclidean_group(1);
    p.a = identity_coefficients(1);
    p.b = zero_drift(1);
    p.f = constant_field(10.0);
    p.g = constant_field(0.0);
    p.phi = constant_field(-0.1);
    p.has_obstacle = true;
    p.box = {{0.0}, {1.0}};
    p.t0 = 0.0;
    p.t1 = 0.1;
    const Grid grid = build_grid(p.box, p.t0, p.t1, {64}, 64);
    SolveOptions opts;
    opts.tol = 1e-9;
    const SolveResult r = solve_obstacle(p, grid, opts);
    c.check(r.diag.converged, "PSOR converged");
    c.check(complementarity_residual(p, grid, r.u) < 1e-8, "complementarity < 1e-8");

    double min_gap = 1e300;
    for (int m = 0; m < grid.levels(); ++m)
      for (long i = 0; i < grid.spatial_nodes(); ++i)
        min_gap = std::min(min_gap, r.u.at(m, i) - p.phi(grid.coords(i), grid.time(m)));
    c.check(min_gap >= -1e-12, "u >= phi - 1e-12");

    const SolveResult pen = solve_obstacle_penalty(p, grid, 1e-5, opts);
    double diff = 0.0;
    for (std::size_t i = 0; i < r.u.values.size(); ++i)
      diff = std::max(diff, std::abs(r.u.values[i] - pen.u.values[i]));
    c.check(diff < 5e-3, "PSOR vs penalization < 5e-3");

    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), pos(0.0, 0.5);
    const Grid small = build_grid({{0.0}, {1.0}}, 0.0, 0.05, {16}, 12);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const double a0 = coef(rng), a1 = coef(rng), b0 = coef(rng);
      const double dg = pos(rng), df = pos(rng);
      ProblemSpec p1 = p;
      p1.t1 = 0.05;
      p1.f = {[b0](const Point& x, double) { return b0 * std::cos(M_PI * x[0]); },
              Smoothness::analytic};
      p1.g = {[a0, a1](const Point& x, double) {
                return a0 * std::sin(M_PI * x[0]) + a1 * x[0];
              },
              Smoothness::analytic};
      p1.phi = {[a0, a1](const Point& x, double) {
                  return a0 * std::sin(M_PI * x[0]) + a1 * x[0] - 0.3;
                },
                Smoothness::analytic};
      ProblemSpec p2 = p1;
      p2.g = {[g1 = p1.g, dg](const Point& x, double t) { return g1(x, t) + dg; },
              p1.g.tag};
      p2.f = {[f1 = p1.f, df](const Point& x, double t) { return f1(x, t) - df; },
              p1.f.tag};
      const SolveResult u1 = solve_obstacle(p1, small, opts);
      const SolveResult u2 = solve_obstacle(p2, small, opts);
      for (std::size_t i = 0; i < u1.u.values.size(); ++i)
        if (u1.u.values[i] > u2.u.values[i] + 1e-10) ++violations;
    }
    c.check(violations == 0, "comparison principle violations");
  }

  Report rep7, rep8, rep9;
  {  // C7: interior rate for a C^{0,alpha} obstacle
    Criterion c(7, "interior decay rate, rough obstacle", 180.0);
    rep7 = run_scenario(builtin_scenario("euclid-obstacle-rate-alpha"));
    c.check(rep7.solver_ok, "solver converged");
    const DecaySequence* seq = find_sequence(rep7, "decay-interior");
    if (seq && seq->gamma_fitted)
      c.check_range(*seq->gamma_fitted, 0.35, 0.8, "fitted exponent");
    else
      c.check(false, "decay sequence missing");
  }

  {  // C8: smooth obstacle rate and S^inf finiteness
    Criterion c(8, "smooth-obstacle rate on heisenberg", 300.0);
    rep8 = run_scenario(builtin_scenario("heisenberg-obstacle-c2"));
    c.check(rep8.solver_ok, "solver converged");
    const DecaySequence* seq = find_sequence(rep8, "decay-c2");
    if (seq && seq->gamma_fitted)
      c.check_range(*seq->gamma_fitted, 1.7, 2.3, "fitted exponent");
    else
      c.check(false, "decay sequence missing");
    const CheckResult* sob = find_check(rep8, "sobolev");
    c.check(sob && sob->status == "pass" && std::isfinite(sob->measured),
            "finite sobolev sup estimate");
  }

  {  // C9: initial-state rate for C^{1,alpha} boundary data
    Criterion c(9, "initial-state decay rate", 180.0);
    rep9 = run_scenario(builtin_scenario("initial-state-c1alpha"));
    c.check(rep9.solver_ok, "solver converged");
    const DecaySequence* seq = find_sequence(rep9, "decay-initial");
    if (seq && seq->gamma_fitted)
      c.check(*seq->gamma_fitted >= 1.3,
              "fitted exponent " + std::to_string(seq->gamma_fitted.value_or(0.0)) +
                  " >= 1.3");
    else
      c.check(false, "decay sequence missing");
  }

  {  // C10: dyadic inequality with the envelope constant on every sequence
    Criterion c(10, "dyadic inequality with envelope constant", 30.0);
    int checked = 0;
    for (const Report* rep : {&rep7, &rep8, &rep9}) {
      for (const auto& [name, seq] : rep->sequences) {
        const double env = envelope_constant(seq, seq.gamma_target);
        c.check(check_dyadic(seq, seq.gamma_target, env).ok, name + " dyadic");
        ++checked;
      }
    }
    c.check(checked >= 3, "all scenario sequences present");
  }

  {  // C11: heisenberg end-to-end
    Criterion c(11, "heisenberg obstacle end-to-end", 600.0);
    const Report smoke = run_scenario(builtin_scenario("heisenberg-smoke"));
    c.check(smoke.solver_ok, "smoke solver converged");
    c.check(smoke.all_pass(), "smoke checks all pass");

    c.check(rep8.solver_ok, "24^3 x 64 solve converged");
    const CheckResult* comp = find_check(rep8, "complementarity");
    c.check(comp && comp->status == "pass", "complementarity");
    const CheckResult* cmp = find_check(rep8, "comparison");
    c.check(cmp && cmp->status == "pass", "comparison spot-check");
    const DecaySequence* seq = find_sequence(rep8, "decay-c2");
    if (seq) {
      bool monotone = true;
      for (std::size_t i = 0; i + 1 < seq->entries.size(); ++i)
        if (seq->entries[i + 1].s > seq->entries[i].s * 1.002) monotone = false;
      c.check(monotone, "monotone decay sequence");
    } else {
      c.check(false, "decay sequence missing");
    }
  }

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
