#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "carnot/calculus.hpp"
#include "carnot/solver.hpp"

using namespace carnot;

namespace {

ProblemSpec heat_1d(double lo = 0.0, double hi = 1.0) {
  ProblemSpec p;
  p.group = euclidean_group(1);
  p.a = identity_coefficients(1);
  p.b = zero_drift(1);
  p.f = constant_field(0.0);
  p.g = constant_field(0.0);
  p.phi = constant_field(-1e300);
  p.has_obstacle = false;
  p.box = {{lo}, {hi}};
  p.t0 = 0.0;
  p.t1 = 0.1;
  return p;
}

ProblemSpec heisenberg_box() {
  ProblemSpec p;
  p.group = heisenberg_group();
  p.a = identity_coefficients(2);
  p.b = zero_drift(2);
  p.f = constant_field(0.0);
  p.g = constant_field(0.0);
  p.phi = constant_field(-1e300);
  p.has_obstacle = false;
  p.box = {{-1, -1, -1}, {1, 1, 1}};
  p.t0 = 0.0;
  p.t1 = 0.5;
  return p;
}

}  // namespace

TEST_CASE("grid construction and classification") {
  const Grid g = build_grid({{0.0}, {1.0}}, 0.0, 1.0, {8}, 8);
  CHECK(g.spatial_nodes() == 8);
  CHECK(g.levels() == 9);

  // parabolic boundary: sides at all 9 levels plus the initial slice,
  // corners counted once: 2*9 + 8 - 2 = 24
  long boundary = 0;
  for (int m = 0; m < g.levels(); ++m)
    for (long i = 0; i < g.spatial_nodes(); ++i)
      if (g.node_boundary(m, i)) ++boundary;
  CHECK(boundary == 24);

  CHECK_THROWS_AS(build_grid({{0.0}, {0.0}}, 0.0, 1.0, {8}, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_grid({{0.0}, {1.0}}, 0.0, 1.0, {4}, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_grid({{0.0}, {1.0}}, 0.0, 1.0, {8}, 0), std::invalid_argument);

  const Grid g3 = build_grid({{-1, -1, -1}, {1, 1, 1}}, 0.0, 1.0, {16, 16, 16}, 8);
  CHECK(g3.spatial_nodes() == 16 * 16 * 16);
}

TEST_CASE("classic heat stencil in 1d") {
  const ProblemSpec p = heat_1d();
  const Grid g = build_grid(p.box, p.t0, p.t1, {16}, 8);
  const StencilOperator op = discretize(p, g);
  const double h = g.spacing(0);

  REQUIRE(op.rows.size() == 14);
  for (std::size_t r = 0; r < op.rows.size(); ++r) {
    const StencilRow& row = op.rows[r];
    CHECK(row.diag == doctest::Approx(-2.0 / (h * h)).epsilon(1e-10));
    double offsum = 0.0;
    for (const auto& [j, w] : row.off) {
      CHECK(w >= 0.0);
      offsum += w;
    }
    CHECK(offsum == doctest::Approx(2.0 / (h * h)).epsilon(1e-10));
    // row consistency: constants annihilated
    CHECK(std::abs(row.diag + offsum) * h * h < 1e-10);
  }
}

TEST_CASE("stencil matches apply_H on a quadratic field (heisenberg)") {
  ProblemSpec p = heisenberg_box();
  const Grid g = build_grid(p.box, p.t0, p.t1, {12, 12, 12}, 8);
  const StencilOperator op = discretize(p, g);

  const ScalarField quad{[](const Point& x, double) { return x[0] * x[0] + x[1] * x[1]; },
                         Smoothness::analytic};
  GridFunction uq = sample_field(g, quad);

  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const int r = static_cast<int>(rng() % op.rows.size());
    const double lh = op.apply_row(r, uq.slice(0));
    const Point x = g.coords(op.interior[r]);
    const double exact = apply_H(p, quad, {x, p.t0}, 1e-4);  // quad has no time term
    worst = std::max(worst, std::abs(lh - exact));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("monotone weights for anisotropic coefficients") {
  ProblemSpec p = heisenberg_box();
  p.a = [](const Point& x, double, double* a) {
    // rotating positive-definite matrix, symmetric by construction
    const double c = std::cos(x[2]), s = std::sin(x[2]);
    const double l1 = 1.5, l2 = 0.5;
    a[0] = l1 * c * c + l2 * s * s;
    a[1] = (l1 - l2) * c * s;
    a[2] = a[1];
    a[3] = l1 * s * s + l2 * c * c;
  };
  const Grid g = build_grid(p.box, p.t0, p.t1, {10, 10, 10}, 8);
  const StencilOperator op = discretize(p, g);
  for (const auto& row : op.rows) {
    CHECK(row.diag <= 1e-12);
    double offsum = 0.0;
    for (const auto& [j, w] : row.off) {
      CHECK(w >= -1e-12);
      offsum += w;
    }
    CHECK(std::abs(row.diag + offsum) < 1e-8 * std::abs(row.diag));
  }

  SUBCASE("indefinite coefficients are rejected") {
    ProblemSpec bad = heisenberg_box();
    bad.a = diagonal_coefficients({1.0, -0.5});
    CHECK_THROWS_AS(discretize(bad, g), StencilError);
  }
}

TEST_CASE("constant data is reproduced") {
  ProblemSpec p = heat_1d();
  p.g = constant_field(3.25);
  const Grid g = build_grid(p.box, p.t0, p.t1, {16}, 16);
  const SolveResult r = solve_cauchy_dirichlet(p, g);
  REQUIRE(r.diag.converged);
  for (double v : r.u.values) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("heat equation against separation of variables") {
  ProblemSpec p = heat_1d();
  p.g = {[](const Point& x, double) { return std::sin(M_PI * x[0]); }, Smoothness::analytic};
  SolveOptions opts;
  opts.tol = 1e-10;

  auto solve_err = [&](int nx, int nt) {
    const Grid g = build_grid(p.box, p.t0, p.t1, {nx}, nt);
    const SolveResult r = solve_cauchy_dirichlet(p, g, opts);
    REQUIRE(r.diag.converged);
    double err = 0.0;
    for (long i = 0; i < g.spatial_nodes(); ++i) {
      const double exact = std::exp(-M_PI * M_PI * 0.1) * std::sin(M_PI * g.coords(i)[0]);
      err = std::max(err, std::abs(r.u.at(g.nt, i) - exact));
    }
    return err;
  };

  const double e1 = solve_err(64, 256);
  CHECK(e1 < 1e-2);
  const double e2 = solve_err(128, 512);
  const double ratio = e1 / e2;
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.6);
}

TEST_CASE("source sign convention") {
  // H contains -d/dt, so f = 1 with zero data pushes u below zero
  ProblemSpec p = heat_1d();
  p.f = constant_field(1.0);
  const Grid g = build_grid(p.box, p.t0, p.t1, {32}, 32);
  const SolveResult r = solve_cauchy_dirichlet(p, g);
  REQUIRE(r.diag.converged);
  const long mid = g.spatial_nodes() / 2;
  CHECK(r.u.at(g.nt, mid) < 0.0);

  // the discrete solution satisfies H u ~ f away from the boundary
  const ScalarField uf = interpolate(r.u);
  const SpaceTimePoint z{{0.5 + 1e-3}, 0.05};
  CHECK(apply_H(p, uf, z, g.spacing(0)) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("obstacle solver") {
  SUBCASE("inactive obstacle reproduces cauchy-dirichlet") {
    ProblemSpec p = heat_1d();
    p.g = {[](const Point& x, double) { return std::sin(M_PI * x[0]); },
           Smoothness::analytic};
    const Grid g = build_grid(p.box, p.t0, p.t1, {32}, 32);
    const SolveResult plain = solve_cauchy_dirichlet(p, g);

    ProblemSpec po = p;
    po.has_obstacle = true;
    po.phi = constant_field(-1e6);
    const SolveResult obst = solve_obstacle(po, g);
    REQUIRE(obst.diag.converged);
    double worst = 0.0;
    for (std::size_t i = 0; i < plain.u.values.size(); ++i)
      worst = std::max(worst, std::abs(plain.u.values[i] - obst.u.values[i]));
    CHECK(worst < 1e-10);
  }

  SUBCASE("zero data with zero obstacle gives zero") {
    ProblemSpec p = heat_1d();
    p.has_obstacle = true;
    p.phi = constant_field(0.0);
    const Grid g = build_grid(p.box, p.t0, p.t1, {16}, 16);
    const SolveResult r = solve_obstacle(p, g);
    REQUIRE(r.diag.converged);
    for (double v : r.u.values) CHECK(v == 0.0);
  }

  SUBCASE("infeasible boundary data is rejected") {
    ProblemSpec p = heat_1d();
    p.has_obstacle = true;
    p.phi = constant_field(0.5);  // above g = 0
    const Grid g = build_grid(p.box, p.t0, p.t1, {16}, 16);
    CHECK_THROWS_AS(solve_obstacle(p, g), std::invalid_argument);
  }

  SUBCASE("contact set with pushing source, cross-checked by penalization") {
    ProblemSpec p = heat_1d();
    p.has_obstacle = true;
    p.f = constant_field(10.0);
    p.phi = constant_field(-0.1);
    const Grid g = build_grid(p.box, p.t0, p.t1, {64}, 64);
    SolveOptions opts;
    opts.tol = 1e-9;
    const SolveResult r = solve_obstacle(p, g, opts);
    REQUIRE(r.diag.converged);

    long contact = 0;
    double min_gap = 1e300;
    for (int m = 1; m <= g.nt; ++m)
      for (long i = 0; i < g.spatial_nodes(); ++i) {
        const double gap = r.u.at(m, i) - (-0.1);
        min_gap = std::min(min_gap, gap);
        if (gap < 1e-9) ++contact;
      }
    CHECK(contact > 0);
    CHECK(min_gap >= -1e-12);
    CHECK(complementarity_residual(p, g, r.u) < 10.0 * opts.tol);

    const SolveResult pen = solve_obstacle_penalty(p, g, 1e-5, opts);
    REQUIRE(pen.diag.converged);
    double diff = 0.0;
    for (std::size_t i = 0; i < r.u.values.size(); ++i)
      diff = std::max(diff, std::abs(r.u.values[i] - pen.u.values[i]));
    CHECK(diff < 5e-3);
  }
}

TEST_CASE("complementarity residual responds to perturbations") {
  ProblemSpec p = heat_1d();
  p.g = {[](const Point& x, double) { return std::sin(M_PI * x[0]); }, Smoothness::analytic};
  const Grid g = build_grid(p.box, p.t0, p.t1, {32}, 32);
  const SolveResult r = solve_cauchy_dirichlet(p, g);
  const double base = complementarity_residual(p, g, r.u);
  CHECK(base < 1e-8);

  GridFunction u2 = r.u;
  const double delta = 1e-3;
  const double h = g.spacing(0);
  u2.at(g.nt / 2, g.spatial_nodes() / 2) += delta;
  const double perturbed = complementarity_residual(p, g, u2);
  CHECK(perturbed >= 0.5 * delta / (h * h));
  CHECK(perturbed <= 8.0 * delta / (h * h));
}

TEST_CASE("discrete comparison principle over random data pairs") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 0.5);

  const Grid g = build_grid({{0.0}, {1.0}}, 0.0, 0.05, {16}, 12);
  int violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double a0 = coef(rng), a1 = coef(rng), b0 = coef(rng);
    const double dg = pos(rng), df = pos(rng), dphi = pos(rng);

    ProblemSpec p1;
    p1.group = euclidean_group(1);
    p1.a = identity_coefficients(1);
    p1.b = zero_drift(1);
    p1.box = {{0.0}, {1.0}};
    p1.t0 = 0.0;
    p1.t1 = 0.05;
    p1.has_obstacle = true;
    p1.g = {[a0, a1](const Point& x, double) {
              return a0 * std::sin(M_PI * x[0]) + a1 * x[0];
            },
            Smoothness::analytic};
    p1.f = {[b0](const Point& x, double) { return b0 * std::cos(M_PI * x[0]); },
            Smoothness::analytic};
    p1.phi = {[a0, a1](const Point& x, double) {
                return a0 * std::sin(M_PI * x[0]) + a1 * x[0] - 0.3;
              },
              Smoothness::analytic};

    ProblemSpec p2 = p1;
    p2.g = {[g1 = p1.g, dg](const Point& x, double t) { return g1(x, t) + dg; }, p1.g.tag};
    p2.f = {[f1 = p1.f, df](const Point& x, double t) { return f1(x, t) - df; }, p1.f.tag};
    p2.phi = {[ph = p1.phi, dphi, dg](const Point& x, double t) {
                return ph(x, t) + std::min(dphi, dg);
              },
              p1.phi.tag};

    const SolveResult u1 = solve_obstacle(p1, g);
    const SolveResult u2 = solve_obstacle(p2, g);
    REQUIRE(u1.diag.converged);
    REQUIRE(u2.diag.converged);
    for (std::size_t i = 0; i < u1.u.values.size(); ++i)
      if (u1.u.values[i] > u2.u.values[i] + 1e-10) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("mesh refinement contraction") {
  ProblemSpec p = heat_1d();
  p.g = {[](const Point& x, double) { return std::sin(M_PI * x[0]); }, Smoothness::analytic};
  SolveOptions opts;
  opts.tol = 1e-11;

  auto solve_at = [&](int nx, int nt) {
    const Grid g = build_grid(p.box, p.t0, p.t1, {nx}, nt);
    return solve_cauchy_dirichlet(p, g, opts).u;
  };
  const GridFunction u0 = solve_at(17, 16);
  const GridFunction u1 = solve_at(33, 32);
  const GridFunction u2 = solve_at(65, 64);

  // nested grids share the coarse nodes; compare there at the final time
  auto diff_on_coarse = [&](const GridFunction& coarse, const GridFunction& fine) {
    double worst = 0.0;
    for (long i = 0; i < coarse.grid.spatial_nodes(); ++i) {
      const double vc = coarse.at(coarse.grid.nt, i);
      const double vf = fine.at(fine.grid.nt, 2 * i);
      worst = std::max(worst, std::abs(vc - vf));
    }
    return worst;
  };
  const double d01 = diff_on_coarse(u0, u1);
  const double d12 = diff_on_coarse(u1, u2);
  CHECK(d12 / d01 <= 0.75);
}

TEST_CASE("single-worker determinism") {
  ProblemSpec p = heat_1d();
  p.g = {[](const Point& x, double) { return std::sin(M_PI * x[0]); }, Smoothness::analytic};
  p.f = constant_field(0.3);
  const Grid g = build_grid(p.box, p.t0, p.t1, {24}, 16);
  const SolveResult r1 = solve_cauchy_dirichlet(p, g);
  const SolveResult r2 = solve_cauchy_dirichlet(p, g);
  CHECK(r1.u.values == r2.u.values);

  SUBCASE("colored sweeps converge to the same solution") {
    SolveOptions opts;
    opts.sweep = SweepOrder::redblack;
    opts.workers = 2;
    const SolveResult rc = solve_cauchy_dirichlet(p, g, opts);
    REQUIRE(rc.diag.converged);
    double worst = 0.0;
    for (std::size_t i = 0; i < r1.u.values.size(); ++i)
      worst = std::max(worst, std::abs(r1.u.values[i] - rc.u.values[i]));
    CHECK(worst < 1e-7);

    SolveOptions opts4 = opts;
    opts4.workers = 4;
    const SolveResult rc4 = solve_cauchy_dirichlet(p, g, opts4);
    CHECK(rc.u.values == rc4.u.values);  // independent of worker count
  }
}

TEST_CASE("checkpoint round trip") {
  ProblemSpec p = heat_1d();
  p.g = {[](const Point& x, double) { return std::sin(M_PI * x[0]) + 1.0 / 3.0; },
         Smoothness::analytic};
  const Grid g = build_grid(p.box, p.t0, p.t1, {16}, 8);
  const SolveResult r = solve_cauchy_dirichlet(p, g);

  const std::string path = "checkpoint_test.cosv1";
  save_checkpoint(path, r.u);
  const GridFunction loaded = load_checkpoint(path);
  CHECK(loaded.values == r.u.values);
  CHECK(loaded.grid.nx == g.nx);
  CHECK(loaded.grid.nt == g.nt);
  CHECK(loaded.grid.dt == g.dt);
  CHECK(loaded.grid.box.lo == g.box.lo);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_checkpoint("no_such_file.cosv1"), std::runtime_error);
}
