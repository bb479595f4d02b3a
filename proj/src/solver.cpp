#include "carnot/solver.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

namespace carnot {

Grid build_grid(const Box& box, double t0, double t1, std::vector<int> nx, int nt) {
  const int n = box.dim();
  if (static_cast<int>(nx.size()) != n)
    throw std::invalid_argument("build_grid: nx size does not match box dimension");
  if (nt < 8) throw std::invalid_argument("build_grid: nt must be >= 8");
  if (!(t1 > t0)) throw std::invalid_argument("build_grid: degenerate time interval");
  for (int ax = 0; ax < n; ++ax) {
    if (nx[ax] < 8) throw std::invalid_argument("build_grid: nx must be >= 8 per axis");
    if (!(box.hi[ax] > box.lo[ax]))
      throw std::invalid_argument("build_grid: degenerate box extent on axis " +
                                  std::to_string(ax));
  }
  Grid g;
  g.box = box;
  g.nx = std::move(nx);
  g.t0 = t0;
  g.nt = nt;
  g.dt = (t1 - t0) / nt;
  return g;
}

GridFunction make_grid_function(const Grid& grid, double fill) {
  GridFunction u;
  u.grid = grid;
  u.values.assign(static_cast<std::size_t>(grid.levels()) * grid.spatial_nodes(), fill);
  return u;
}

GridFunction sample_field(const Grid& grid, const ScalarField& f) {
  GridFunction u = make_grid_function(grid);
  const long ns = grid.spatial_nodes();
  for (int m = 0; m < grid.levels(); ++m) {
    const double t = grid.time(m);
    for (long i = 0; i < ns; ++i) u.at(m, i) = f(grid.coords(i), t);
  }
  return u;
}

namespace {

// Multilinear interpolation corners; returns false if x is outside the box.
bool interp_weights(const Grid& grid, const Point& x,
                    std::vector<std::pair<long, double>>& out) {
  const int n = grid.dim();
  int base[8];
  double frac[8];
  for (int ax = 0; ax < n; ++ax) {
    const double h = grid.spacing(ax);
    const double rel = (x[ax] - grid.box.lo[ax]) / h;
    if (rel < -1e-12 || rel > grid.nx[ax] - 1 + 1e-12) return false;
    int cell = static_cast<int>(std::floor(rel));
    cell = std::min(std::max(cell, 0), grid.nx[ax] - 2);
    base[ax] = cell;
    frac[ax] = std::min(std::max(rel - cell, 0.0), 1.0);
  }
  out.clear();
  const int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    int mi[8];
    for (int ax = 0; ax < n; ++ax) {
      const int up = (c >> ax) & 1;
      w *= up ? frac[ax] : 1.0 - frac[ax];
      mi[ax] = base[ax] + up;
    }
    if (w != 0.0) out.emplace_back(grid.flatten(mi), w);
  }
  return true;
}

}  // namespace

ScalarField interpolate(const GridFunction& u) {
  // copy grid + values into the closure; fields outlive the solve result
  auto grid = std::make_shared<Grid>(u.grid);
  auto vals = std::make_shared<std::vector<double>>(u.values);
  return {[grid, vals](const Point& x, double t) {
            std::vector<std::pair<long, double>> w;
            if (!interp_weights(*grid, x, w))
              throw std::out_of_range("interpolate: point outside grid box");
            double rel = (t - grid->t0) / grid->dt;
            rel = std::min(std::max(rel, 0.0), static_cast<double>(grid->nt));
            const int lv = std::min(static_cast<int>(rel), grid->nt - 1);
            const double ft = rel - lv;
            const long ns = grid->spatial_nodes();
            double v0 = 0.0, v1 = 0.0;
            for (const auto& [j, wj] : w) {
              v0 += wj * (*vals)[static_cast<std::size_t>(lv) * ns + j];
              v1 += wj * (*vals)[static_cast<std::size_t>(lv + 1) * ns + j];
            }
            return (1.0 - ft) * v0 + ft * v1;
          },
          Smoothness::grid_interpolated};
}

namespace {

struct RowAccum {
  double diag = 0.0;
  std::vector<std::pair<long, double>>* off;
  long center;

  void add(long node, double w) {
    if (node == center) {
      diag += w;
      return;
    }
    for (auto& e : *off)
      if (e.first == node) {
        e.second += w;
        return;
      }
    off->emplace_back(node, w);
  }
};

}  // namespace

StencilOperator discretize_at(const ProblemSpec& p, const Grid& grid, double t) {
  const int n = grid.dim(), q = p.group.q;
  if (p.group.n != n) throw std::invalid_argument("discretize: group/grid dimension mismatch");

  StencilOperator op;
  op.time = t;
  const long ns = grid.spatial_nodes();
  op.row_of.assign(ns, -1);

  double hmin = 1e300;
  for (int ax = 0; ax < n; ++ax) hmin = std::min(hmin, grid.spacing(ax));

  Eigen::MatrixXd amat(q, q);
  std::vector<double> a(static_cast<std::size_t>(q) * q), b(q), dir(q);
  std::vector<double> coeffs(static_cast<std::size_t>(q) * n);
  std::vector<std::pair<long, double>> interp;

  for (long idx = 0; idx < ns; ++idx) {
    if (grid.spatial_boundary(idx)) continue;
    const Point x = grid.coords(idx);
    p.a(x, t, a.data());
    p.b(x, t, b.data());
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) amat(i, j) = a[i * q + j];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(amat);
    StencilRow row;
    RowAccum acc{0.0, &row.off, idx};

    p.group.field_coeffs(x.data(), coeffs.data());

    for (int k = 0; k < q; ++k) {
      const double lambda = eig.eigenvalues()(k);
      if (lambda <= 0.0)
        throw StencilError("discretize: coefficient matrix not positive definite at node " +
                               std::to_string(idx),
                           idx, x);
      for (int i = 0; i < q; ++i) dir[i] = eig.eigenvectors()(i, k);

      // per-axis displacement bound of Y = sum dir_i X_i keeps endpoints one
      // cell away so interior stencils cannot leave the box
      double h = 1e300;
      for (int ax = 0; ax < n; ++ax) {
        double disp = 0.0;
        for (int i = 0; i < q; ++i) disp += dir[i] * coeffs[static_cast<std::size_t>(i) * n + ax];
        disp = std::abs(disp);
        if (disp > 1e-13) h = std::min(h, grid.spacing(ax) / disp);
      }
      if (h > 1e299) h = hmin;

      bool placed = false;
      for (int attempt = 0; attempt < 4 && !placed; ++attempt, h *= 0.5) {
        const Point ep = flow_direction(p.group, dir.data(), h, x);
        const Point em = flow_direction(p.group, dir.data(), -h, x);
        std::vector<std::pair<long, double>> wp, wm;
        if (!interp_weights(grid, ep, wp) || !interp_weights(grid, em, wm)) continue;
        const double scale = lambda / (h * h);
        for (const auto& [j, w] : wp) acc.add(j, scale * w);
        for (const auto& [j, w] : wm) acc.add(j, scale * w);
        acc.diag -= 2.0 * scale;
        placed = true;
      }
      if (!placed)
        throw StencilError(
            "discretize: flow endpoint left the box after 3 step halvings at node " +
                std::to_string(idx),
            idx, x);
    }

    for (int i = 0; i < q; ++i) {
      if (b[i] == 0.0) continue;
      const double s = b[i] > 0.0 ? 1.0 : -1.0;
      double h = 1e300;
      for (int ax = 0; ax < n; ++ax) {
        const double disp = std::abs(coeffs[static_cast<std::size_t>(i) * n + ax]);
        if (disp > 1e-13) h = std::min(h, grid.spacing(ax) / disp);
      }
      if (h > 1e299) h = hmin;
      bool placed = false;
      for (int attempt = 0; attempt < 4 && !placed; ++attempt, h *= 0.5) {
        const Point ep = flow(p.group, i, s * h, x);
        if (!interp_weights(grid, ep, interp)) continue;
        const double scale = std::abs(b[i]) / h;
        for (const auto& [j, w] : interp) acc.add(j, scale * w);
        acc.diag -= scale;
        placed = true;
      }
      if (!placed)
        throw StencilError("discretize: drift endpoint left the box at node " +
                               std::to_string(idx),
                           idx, x);
    }

    row.diag = acc.diag;
    // monotonicity: interpolation weights are convex so this can only trip on
    // a logic error, but we never run an unverified stencil
    for (const auto& [j, w] : row.off)
      if (w < -1e-12)
        throw StencilError("discretize: negative off-diagonal weight at node " +
                               std::to_string(idx),
                           idx, x);
    if (row.diag > 1e-12)
      throw StencilError("discretize: positive diagonal at node " + std::to_string(idx), idx,
                         x);

    op.row_of[idx] = static_cast<int>(op.interior.size());
    op.interior.push_back(idx);
    op.rows.push_back(std::move(row));
  }
  return op;
}

StencilOperator discretize(const ProblemSpec& p, const Grid& grid) {
  return discretize_at(p, grid, grid.t0);
}

namespace {

struct StepContext {
  std::vector<double> rhs, adiag, phi;
};

// One Gauss-Seidel / PSOR pass over `order`; residual measured separately.
void sweep_pass(const StencilOperator& op, const StepContext& ctx, bool obstacle,
                const std::vector<long>& order, double* u) {
  for (long r : order) {
    const StencilRow& row = op.rows[r];
    const long i = op.interior[r];
    double s = 0.0;
    for (const auto& [j, w] : row.off) s += w * u[j];
    double v = (ctx.rhs[r] + s) / ctx.adiag[r];
    if (obstacle) v = std::max(v, ctx.phi[r]);
    u[i] = v;
  }
}

// Colored pass: updates within one color read the state as of the color
// start and are committed together, so results are independent of the worker
// count (they do differ from the lexicographic sweep).
void sweep_pass_colored(const StencilOperator& op, const StepContext& ctx, bool obstacle,
                        const std::vector<std::vector<long>>& colors, int workers,
                        double* u, std::vector<double>& staging) {
  for (const auto& color : colors) {
    staging.resize(color.size());
    auto chunk = [&](std::size_t begin, std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) {
        const long r = color[c];
        const StencilRow& row = op.rows[r];
        double s = 0.0;
        for (const auto& [j, w] : row.off) s += w * u[j];
        double v = (ctx.rhs[r] + s) / ctx.adiag[r];
        if (obstacle) v = std::max(v, ctx.phi[r]);
        staging[c] = v;
      }
    };
    if (workers <= 1 || color.size() < 1024) {
      chunk(0, color.size());
    } else {
      std::vector<std::thread> pool;
      const std::size_t per = (color.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const std::size_t b = w * per, e = std::min(color.size(), b + per);
        if (b < e) pool.emplace_back(chunk, b, e);
      }
      for (auto& th : pool) th.join();
    }
    for (std::size_t c = 0; c < color.size(); ++c) u[op.interior[color[c]]] = staging[c];
  }
}

double step_residual(const StencilOperator& op, const StepContext& ctx, bool obstacle,
                     const double* u) {
  double worst = 0.0;
  for (std::size_t r = 0; r < op.rows.size(); ++r) {
    const StencilRow& row = op.rows[r];
    const long i = op.interior[r];
    double s = 0.0;
    for (const auto& [j, w] : row.off) s += w * u[j];
    // A u - rhs with A = I/dt - L_h, sign-flipped into H u - f form
    const double pde = ctx.rhs[r] + s - ctx.adiag[r] * u[i];
    const double res = obstacle ? std::max(pde, ctx.phi[r] - u[i]) : pde;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

enum class Method { cauchy, psor, penalty };

SolveResult solve_engine(const ProblemSpec& p, const Grid& grid, const SolveOptions& opts,
                         Method method, double eps) {
  const bool obstacle = method != Method::cauchy && p.has_obstacle;
  if (method != Method::cauchy && !p.has_obstacle)
    return solve_engine(p, grid, opts, Method::cauchy, 0.0);

  if (obstacle) {
    const ProblemValidation v = validate_problem(p, 256, 17);
    if (!v.boundary_ordered)
      throw std::invalid_argument(
          "solve_obstacle: infeasible data, g < phi on the parabolic boundary (worst gap " +
          std::to_string(v.worst_gap) + ")");
  }

  const long ns = grid.spatial_nodes();
  GridFunction u = make_grid_function(grid);
  for (long i = 0; i < ns; ++i) u.at(0, i) = p.g(grid.coords(i), grid.t0);

  SolveResult out;
  out.diag.step_iterations.reserve(grid.nt);
  out.diag.step_residuals.reserve(grid.nt);

  const double inv_dt = 1.0 / grid.dt;
  StepContext ctx;

  for (int m = 1; m <= grid.nt; ++m) {
    const double t = grid.time(m);
    const StencilOperator op = discretize_at(p, grid, t);
    const std::size_t nrow = op.rows.size();

    double* um = u.slice(m);
    const double* um1 = u.slice(m - 1);
    std::memcpy(um, um1, sizeof(double) * ns);
    for (long i = 0; i < ns; ++i)
      if (grid.spatial_boundary(i)) um[i] = p.g(grid.coords(i), t);

    ctx.rhs.resize(nrow);
    ctx.adiag.resize(nrow);
    ctx.phi.resize(nrow);
    for (std::size_t r = 0; r < nrow; ++r) {
      const long i = op.interior[r];
      const Point x = grid.coords(i);
      ctx.rhs[r] = um1[i] * inv_dt - p.f(x, t);
      ctx.adiag[r] = inv_dt - op.rows[r].diag;
      ctx.phi[r] = obstacle ? p.phi(x, t) : 0.0;
    }

    std::vector<long> order(nrow);
    for (std::size_t r = 0; r < nrow; ++r) order[r] = static_cast<long>(r);
    std::vector<std::vector<long>> colors;
    if (opts.sweep == SweepOrder::redblack) {
      colors.assign(2, {});
      std::vector<int> mi(grid.dim());
      for (std::size_t r = 0; r < nrow; ++r) {
        grid.unflatten(op.interior[r], mi.data());
        int s = 0;
        for (int v : mi) s += v;
        colors[s % 2].push_back(static_cast<long>(r));
      }
    }
    std::vector<double> staging;

    long iter = 0;
    double res = 0.0;
    for (; iter < opts.max_iter; ++iter) {
      if (method == Method::penalty) {
        for (long r : order) {
          const StencilRow& row = op.rows[r];
          const long i = op.interior[r];
          double s = 0.0;
          for (const auto& [j, w] : row.off) s += w * um[j];
          double v = (ctx.rhs[r] + s) / ctx.adiag[r];
          if (v < ctx.phi[r]) v = (ctx.rhs[r] + s + ctx.phi[r] / eps) / (ctx.adiag[r] + 1.0 / eps);
          um[i] = v;
        }
        res = 0.0;
        for (std::size_t r = 0; r < nrow; ++r) {
          const StencilRow& row = op.rows[r];
          const long i = op.interior[r];
          double s = 0.0;
          for (const auto& [j, w] : row.off) s += w * um[j];
          const double pde = ctx.rhs[r] + s - ctx.adiag[r] * um[i];
          const double pen = std::max(ctx.phi[r] - um[i], 0.0) / eps;
          res = std::max(res, std::abs(pde + pen));
        }
      } else {
        if (opts.sweep == SweepOrder::redblack)
          sweep_pass_colored(op, ctx, obstacle, colors, opts.workers, um, staging);
        else
          sweep_pass(op, ctx, obstacle, order, um);
        res = step_residual(op, ctx, obstacle, um);
      }
      if (res < opts.tol) break;
    }

    out.diag.total_iterations += iter + 1;
    out.diag.step_iterations.push_back(iter + 1);
    out.diag.step_residuals.push_back(res);
    out.diag.worst_residual = std::max(out.diag.worst_residual, res);
    if (res >= opts.tol) {
      out.diag.converged = false;
      out.diag.failed_level = m;
      break;
    }
  }

  out.u = std::move(u);
  return out;
}

}  // namespace

SolveResult solve_cauchy_dirichlet(const ProblemSpec& p, const Grid& grid,
                                   const SolveOptions& opts) {
  return solve_engine(p, grid, opts, Method::cauchy, 0.0);
}

SolveResult solve_obstacle(const ProblemSpec& p, const Grid& grid, const SolveOptions& opts) {
  return solve_engine(p, grid, opts, Method::psor, 0.0);
}

SolveResult solve_obstacle_penalty(const ProblemSpec& p, const Grid& grid, double eps,
                                   const SolveOptions& opts) {
  if (!(eps > 0.0)) throw std::invalid_argument("solve_obstacle_penalty: eps must be positive");
  return solve_engine(p, grid, opts, Method::penalty, eps);
}

double complementarity_residual(const ProblemSpec& p, const Grid& grid,
                                const GridFunction& u) {
  const double inv_dt = 1.0 / grid.dt;
  double worst = 0.0;
  for (int m = 1; m <= grid.nt; ++m) {
    const double t = grid.time(m);
    const StencilOperator op = discretize_at(p, grid, t);
    const double* um = u.slice(m);
    const double* um1 = u.slice(m - 1);
    for (std::size_t r = 0; r < op.rows.size(); ++r) {
      const long i = op.interior[r];
      const Point x = grid.coords(i);
      const double pde = op.apply_row(static_cast<int>(r), um) - (um[i] - um1[i]) * inv_dt -
                         p.f(x, t);
      const double res =
          p.has_obstacle ? std::max(pde, p.phi(x, t) - um[i]) : pde;
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst;
}

void save_checkpoint(const std::string& path, const GridFunction& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  const Grid& g = u.grid;
  out << "COSV1\n";
  out << "dim " << g.dim() << "\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  out << "box";
  for (int ax = 0; ax < g.dim(); ++ax) {
    out << ' ';
    put(g.box.lo[ax]);
    out << ' ';
    put(g.box.hi[ax]);
  }
  out << "\nnx";
  for (int k : g.nx) out << ' ' << k;
  out << "\nnt " << g.nt << "\nt0 ";
  put(g.t0);
  out << "\ndt ";
  put(g.dt);
  out << "\nvalues " << u.values.size() << "\n";
  for (double v : u.values) {
    put(v);
    out << "\n";
  }
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

GridFunction load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string tag;
  in >> tag;
  if (tag != "COSV1") throw std::runtime_error("load_checkpoint: bad header, expected COSV1");
  GridFunction u;
  Grid& g = u.grid;
  int dim = 0;
  std::size_t count = 0;
  while (in >> tag) {
    if (tag == "dim") {
      in >> dim;
      g.box.lo.resize(dim);
      g.box.hi.resize(dim);
    } else if (tag == "box") {
      for (int ax = 0; ax < dim; ++ax) in >> g.box.lo[ax] >> g.box.hi[ax];
    } else if (tag == "nx") {
      g.nx.resize(dim);
      for (int ax = 0; ax < dim; ++ax) in >> g.nx[ax];
    } else if (tag == "nt") {
      in >> g.nt;
    } else if (tag == "t0") {
      in >> g.t0;
    } else if (tag == "dt") {
      in >> g.dt;
    } else if (tag == "values") {
      in >> count;
      u.values.resize(count);
      for (std::size_t i = 0; i < count; ++i) in >> u.values[i];
      break;
    } else {
      throw std::runtime_error("load_checkpoint: unexpected field '" + tag + "'");
    }
  }
  if (!in) throw std::runtime_error("load_checkpoint: truncated file " + path);
  if (count != static_cast<std::size_t>(g.levels()) * g.spatial_nodes())
    throw std::runtime_error("load_checkpoint: value count does not match grid shape");
  return u;
}

}  // namespace carnot
