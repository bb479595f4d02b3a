#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "carnot/fields.hpp"

namespace carnot {

// Uniform tensor grid over a coordinate box times (t0, t0 + nt*dt].  There
// are nt time steps, hence nt+1 stored levels; level 0 is the initial slice.
// The parabolic boundary is the spatial sides at all times plus the initial
// slice; everything else is interior.
struct Grid {
  Box box;
  std::vector<int> nx;
  double t0 = 0.0;
  double dt = 0.0;
  int nt = 0;

  int dim() const { return static_cast<int>(nx.size()); }
  int levels() const { return nt + 1; }
  long spatial_nodes() const {
    long s = 1;
    for (int k : nx) s *= k;
    return s;
  }
  double spacing(int ax) const { return (box.hi[ax] - box.lo[ax]) / (nx[ax] - 1); }
  double time(int level) const { return t0 + level * dt; }

  long flatten(const int* mi) const {
    long idx = 0;
    for (int ax = dim() - 1; ax >= 0; --ax) idx = idx * nx[ax] + mi[ax];
    return idx;
  }
  void unflatten(long idx, int* mi) const {
    for (int ax = 0; ax < dim(); ++ax) {
      mi[ax] = static_cast<int>(idx % nx[ax]);
      idx /= nx[ax];
    }
  }
  Point coords(long idx) const {
    Point x(dim());
    for (int ax = 0; ax < dim(); ++ax) {
      x[ax] = box.lo[ax] + static_cast<double>(idx % nx[ax]) * spacing(ax);
      idx /= nx[ax];
    }
    return x;
  }
  bool spatial_boundary(long idx) const {
    for (int ax = 0; ax < dim(); ++ax) {
      const int i = static_cast<int>(idx % nx[ax]);
      if (i == 0 || i == nx[ax] - 1) return true;
      idx /= nx[ax];
    }
    return false;
  }
  bool node_boundary(int level, long idx) const {
    return level == 0 || spatial_boundary(idx);
  }
};

Grid build_grid(const Box& box, double t0, double t1, std::vector<int> nx, int nt);

struct GridFunction {
  Grid grid;
  std::vector<double> values;  // levels() * spatial_nodes()

  double& at(int level, long idx) { return values[level * grid.spatial_nodes() + idx]; }
  double at(int level, long idx) const { return values[level * grid.spatial_nodes() + idx]; }
  const double* slice(int level) const { return values.data() + level * grid.spatial_nodes(); }
  double* slice(int level) { return values.data() + level * grid.spatial_nodes(); }
};

GridFunction make_grid_function(const Grid& grid, double fill = 0.0);
GridFunction sample_field(const Grid& grid, const ScalarField& f);

// Multilinear-in-space, linear-in-time interpolant of a grid function.
ScalarField interpolate(const GridFunction& u);

struct StencilError : std::runtime_error {
  long node;
  Point coords;
  StencilError(std::string msg, long node_, Point coords_)
      : std::runtime_error(std::move(msg)), node(node_), coords(std::move(coords_)) {}
};

// Spatial part L_h of H at one time level.  Built from flow-based directional
// second differences along the eigendirections of a(z) plus upwinded first
// order terms; off-grid flow endpoints are resolved by multilinear
// interpolation.  Off-diagonal weights are nonnegative and rows annihilate
// constants, which is the discrete surrogate of the weak maximum principle.
struct StencilRow {
  double diag = 0.0;
  std::vector<std::pair<long, double>> off;  // (neighbor node, weight >= 0)
};

struct StencilOperator {
  double time = 0.0;
  std::vector<long> interior;            // spatial indices with a row
  std::vector<StencilRow> rows;          // parallel to `interior`
  std::vector<int> row_of;               // spatial index -> row position or -1

  double apply_row(int r, const double* slice) const {
    const StencilRow& row = rows[r];
    double v = row.diag * slice[interior[r]];
    for (const auto& [j, w] : row.off) v += w * slice[j];
    return v;
  }
};

// Builds L_h at time t (defaults to the initial time).  If an interpolated
// flow endpoint leaves the box the directional step is halved up to 3 times,
// then the operation fails with the offending node; a non-monotone stencil is
// never returned.
StencilOperator discretize(const ProblemSpec& p, const Grid& grid);
StencilOperator discretize_at(const ProblemSpec& p, const Grid& grid, double t);

enum class SweepOrder { lex, redblack };

struct SolveOptions {
  double tol = 1e-9;
  long max_iter = 50000;   // per time step
  SweepOrder sweep = SweepOrder::lex;
  int workers = 1;         // > 1 uses colored sweeps (not bit-exact vs lex)
};

struct SolveDiagnostics {
  bool converged = true;
  long total_iterations = 0;
  int failed_level = -1;
  double worst_residual = 0.0;         // max over levels of final residual
  std::vector<long> step_iterations;
  std::vector<double> step_residuals;
};

struct SolveResult {
  GridFunction u;
  SolveDiagnostics diag;
};

// Implicit Euler in time; per step Gauss-Seidel on (I/dt - L_h) u = rhs with
// boundary and initial values taken from g.
SolveResult solve_cauchy_dirichlet(const ProblemSpec& p, const Grid& grid,
                                   const SolveOptions& opts = {});

// Projected Gauss-Seidel: after each relaxation u <- max(u, phi); converged
// when the complementarity residual drops below tol.  Rejects data with
// g < phi on the parabolic boundary.
SolveResult solve_obstacle(const ProblemSpec& p, const Grid& grid,
                           const SolveOptions& opts = {});

// Penalized cross-check oracle: solves H u - f = -(1/eps) max(phi - u, 0)
// by semismooth Gauss-Seidel; approaches the obstacle solution as eps -> 0.
SolveResult solve_obstacle_penalty(const ProblemSpec& p, const Grid& grid, double eps,
                                   const SolveOptions& opts = {});

// max over interior nodes and levels >= 1 of |max{L_h u - du/dt - f, phi - u}|
// (first branch only when the problem has no obstacle).
double complementarity_residual(const ProblemSpec& p, const Grid& grid,
                                const GridFunction& u);

// COSV1 checkpoint: text dump of grid metadata plus node values, written with
// round-trip-exact formatting.  Layout documented in docs/checkpoint.md.
void save_checkpoint(const std::string& path, const GridFunction& u);
GridFunction load_checkpoint(const std::string& path);

}  // namespace carnot
