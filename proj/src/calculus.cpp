#include "carnot/calculus.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "carnot/rng.hpp"

namespace carnot {

double xdiff(const GroupSpec& spec, const ScalarField& u, int i, const SpaceTimePoint& z,
             double h) {
  if (!(h > 0.0)) throw std::invalid_argument("xdiff: step must be positive");
  const Point fwd = flow(spec, i, h, z.x);
  const Point bwd = flow(spec, i, -h, z.x);
  return (u(fwd, z.t) - u(bwd, z.t)) / (2.0 * h);
}

double xxdiff(const GroupSpec& spec, const ScalarField& u, int i, int j,
              const SpaceTimePoint& z, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("xxdiff: step must be positive");
  auto xj = [&](const Point& x) {
    const Point fwd = flow(spec, j, h, x);
    const Point bwd = flow(spec, j, -h, x);
    return (u(fwd, z.t) - u(bwd, z.t)) / (2.0 * h);
  };
  const Point fwd = flow(spec, i, h, z.x);
  const Point bwd = flow(spec, i, -h, z.x);
  return (xj(fwd) - xj(bwd)) / (2.0 * h);
}

double tdiff(const ScalarField& u, const SpaceTimePoint& z, double h) {
  return (u(z.x, z.t + h) - u(z.x, z.t - h)) / (2.0 * h);
}

double apply_H(const ProblemSpec& p, const ScalarField& u, const SpaceTimePoint& z, double h) {
  const int q = p.group.q;
  std::vector<double> a(static_cast<std::size_t>(q) * q), b(q);
  p.a(z.x, z.t, a.data());
  p.b(z.x, z.t, b.data());

  double val = 0.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      if (a[i * q + j] != 0.0) val += a[i * q + j] * xxdiff(p.group, u, i, j, z, h);
  for (int i = 0; i < q; ++i)
    if (b[i] != 0.0) val += b[i] * xdiff(p.group, u, i, z, h);
  return val - tdiff(u, z, h);
}

ScalarField taylor_p(int m, const ScalarField& u, const SpaceTimePoint& base,
                     const GroupSpec& spec, double fd_h) {
  if (m != 0 && m != 1) throw std::invalid_argument("taylor_p: m must be 0 or 1");
  const double u0 = u(base);
  if (m == 0) return constant_field(u0);

  std::vector<double> grad(spec.q);
  for (int i = 0; i < spec.q; ++i) grad[i] = xdiff(spec, u, i, base, fd_h);
  Point bx = base.x;
  return {[u0, grad, bx](const Point& x, double) {
            double v = u0;
            for (std::size_t i = 0; i < grad.size(); ++i) v += grad[i] * (x[i] - bx[i]);
            return v;
          },
          Smoothness::analytic};
}

namespace {

// R2 low-discrepancy sequence (generalized golden ratio) in [0,1)^d.
void r2_point(int d, long index, double* out) {
  // phi_d is the unique positive root of x^{d+1} = x + 1
  double phi = 1.3;
  for (int it = 0; it < 40; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  double alpha = 1.0;
  for (int j = 0; j < d; ++j) {
    alpha /= phi;
    out[j] = std::fmod(0.5 + alpha * (index + 1), 1.0);
  }
}

SpaceTimePoint box_point(const SpaceTimeBox& region, const double* unit, int n) {
  SpaceTimePoint z;
  z.x.resize(n);
  for (int j = 0; j < n; ++j)
    z.x[j] = region.space.lo[j] + unit[j] * (region.space.hi[j] - region.space.lo[j]);
  z.t = region.t0 + unit[n] * (region.t1 - region.t0);
  return z;
}

}  // namespace

HolderEstimate holder_norm_estimate(const ScalarField& u, int m, double alpha,
                                    const SpaceTimeBox& region, const GroupSpec& spec,
                                    long sample_pairs, double fd_h) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("holder_norm_estimate: alpha must lie in (0,1)");
  if (m < 0 || m > 2) throw std::invalid_argument("holder_norm_estimate: m must be 0, 1 or 2");
  const int n = spec.n, q = spec.q;
  const int d = 2 * (n + 1);

  HolderEstimate est;
  std::vector<double> unit(d), grad(q);

  auto feed = [&](const SpaceTimePoint& z, const SpaceTimePoint& w) {
    const double dp = parabolic_quasi_distance(spec, z, w);
    if (dp < 1e-12) return;
    const double uz = u(z), uw = u(w);
    est.sup_u = std::max(est.sup_u, std::max(std::abs(uz), std::abs(uw)));
    est.quotient0 = std::max(est.quotient0, std::abs(uz - uw) / std::pow(dp, alpha));
    if (m >= 1) {
      double lin = uz - uw;
      for (int i = 0; i < q; ++i) {
        grad[i] = xdiff(spec, u, i, w, fd_h);
        lin -= grad[i] * (z.x[i] - w.x[i]);
        est.sup_x = std::max(est.sup_x, std::abs(grad[i]));
      }
      est.quotient1 = std::max(est.quotient1, std::abs(lin) / std::pow(dp, 1.0 + alpha));
    }
    ++est.pairs;
  };

  SpaceTimePoint center;
  center.x.resize(n);
  for (int j = 0; j < n; ++j) center.x[j] = 0.5 * (region.space.lo[j] + region.space.hi[j]);
  center.t = 0.5 * (region.t0 + region.t1);

  // low-discrepancy far pairs, each also anchored at the region center and a
  // cycled corner so ray-aligned suprema are reachable
  const long far = sample_pairs / 3;
  for (long s = 0; s < far; ++s) {
    r2_point(d, s, unit.data());
    const SpaceTimePoint z1 = box_point(region, unit.data(), n);
    const SpaceTimePoint z2 = box_point(region, unit.data() + n + 1, n);
    feed(z1, z2);
    feed(z1, center);
    SpaceTimePoint corner;
    corner.x.resize(n);
    for (int j = 0; j < n; ++j)
      corner.x[j] = ((s >> j) & 1) ? region.space.hi[j] : region.space.lo[j];
    corner.t = ((s >> n) & 1) ? region.t1 : region.t0;
    feed(z2, corner);
  }
  // near-diagonal pairs at shrinking separations
  for (long s = 0; 3 * far + s < sample_pairs; ++s) {
    r2_point(d, far + s, unit.data());
    const SpaceTimePoint z = box_point(region, unit.data(), n);
    SpaceTimePoint w = z;
    const double scale = std::pow(0.5, 2 + (s % 6));
    for (int j = 0; j < n; ++j) {
      const double ext = region.space.hi[j] - region.space.lo[j];
      w.x[j] += scale * ext * (unit[n + 1 + j] - 0.5);
      w.x[j] = std::min(std::max(w.x[j], region.space.lo[j]), region.space.hi[j]);
    }
    w.t += scale * scale * (region.t1 - region.t0) * (unit[d - 1] - 0.5);
    w.t = std::min(std::max(w.t, region.t0), region.t1);
    feed(z, w);
  }

  // m = 0: sup|u| + Q0;  m = 1: sup|u| + sum sup|X_i u| + Q1;
  // m = 2 adds the second-derivative and time sup norms to the m = 0 form.
  // Quotients of the derivative fields are not estimated; the value is a
  // sampled lower estimator of the full norm.
  est.total = est.sup_u;
  if (m == 0 || m == 2) est.total += est.quotient0;
  if (m >= 1) est.total += est.sup_x;
  if (m == 1) est.total += est.quotient1;
  if (m == 2) {
    // sup norms of second derivatives on an interior lattice
    const int lat = 7;
    std::vector<double> pt(n + 1);
    for (long idx = 0; idx < std::pow(lat, n + 1); ++idx) {
      long rem = idx;
      for (int j = 0; j <= n; ++j) {
        pt[j] = (0.5 + rem % lat) / lat;
        rem /= lat;
      }
      SpaceTimePoint z = box_point(region, pt.data(), n);
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
          est.sup_xx = std::max(est.sup_xx, std::abs(xxdiff(spec, u, i, j, z, fd_h)));
      est.sup_t = std::max(est.sup_t, std::abs(tdiff(u, z, std::min(fd_h, 0.4 * (region.t1 - region.t0) / lat))));
    }
    est.total += est.sup_xx + est.sup_t;
  }
  return est;
}

double sobolev_sup_estimate(const ScalarField& u, const ProblemSpec& p,
                            const SpaceTimeBox& region, double h, int lattice) {
  const int n = p.group.n, q = p.group.q;
  for (int j = 0; j < n; ++j)
    if (region.space.hi[j] - region.space.lo[j] < 4.0 * h)
      throw std::invalid_argument("sobolev_sup_estimate: region too small for margin 2h");
  if (region.t1 - region.t0 < 4.0 * h)
    throw std::invalid_argument("sobolev_sup_estimate: time extent too small for margin 2h");

  double sup_u = 0.0, sup_t = 0.0;
  std::vector<double> sup_x(q, 0.0), sup_xx(static_cast<std::size_t>(q) * q, 0.0);
  std::vector<double> pt(n + 1);
  SpaceTimeBox inner = region;
  for (int j = 0; j < n; ++j) {
    inner.space.lo[j] += 2.0 * h;
    inner.space.hi[j] -= 2.0 * h;
  }
  inner.t0 += 2.0 * h;
  inner.t1 -= 2.0 * h;

  long total = 1;
  for (int j = 0; j <= n; ++j) total *= lattice;
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int j = 0; j <= n; ++j) {
      pt[j] = (0.5 + rem % lattice) / lattice;
      rem /= lattice;
    }
    const SpaceTimePoint z = box_point(inner, pt.data(), n);
    sup_u = std::max(sup_u, std::abs(u(z)));
    sup_t = std::max(sup_t, std::abs(tdiff(u, z, h)));
    for (int i = 0; i < q; ++i) {
      sup_x[i] = std::max(sup_x[i], std::abs(xdiff(p.group, u, i, z, h)));
      for (int j = 0; j < q; ++j)
        sup_xx[i * q + j] =
            std::max(sup_xx[i * q + j], std::abs(xxdiff(p.group, u, i, j, z, h)));
    }
  }
  double total_norm = sup_u + sup_t;
  for (double v : sup_x) total_norm += v;
  for (double v : sup_xx) total_norm += v;
  return total_norm;
}

std::pair<double, SpaceTimePoint> taylor_remainder_check(const ScalarField& u, int m,
                                                         double alpha,
                                                         const SpaceTimePoint& base,
                                                         const SpaceTimeBox& region,
                                                         const GroupSpec& spec, long samples,
                                                         double fd_h) {
  const ScalarField pm = taylor_p(m, u, base, spec, fd_h);
  const int n = spec.n;
  std::vector<double> unit(n + 1);
  double worst = 0.0;
  SpaceTimePoint worst_z = base;
  for (long s = 0; s < samples; ++s) {
    r2_point(n + 1, s, unit.data());
    const SpaceTimePoint z = box_point(region, unit.data(), n);
    const double dp = parabolic_quasi_distance(spec, z, base);
    if (dp < 1e-9) continue;
    const double quot = std::abs(u(z) - pm(z)) / std::pow(dp, m + alpha);
    if (quot > worst) {
      worst = quot;
      worst_z = z;
    }
  }
  return {worst, worst_z};
}

namespace {

// [X, Y]_k = sum_m (X_m dY_k/dx_m - Y_m dX_k/dx_m), fields given as vectors of
// coefficient evaluators.
using FieldEval = std::function<void(const double*, double*)>;

FieldEval bracket(FieldEval X, FieldEval Y, int n, double h) {
  return [X, Y, n, h](const double* x, double* out) {
    std::vector<double> xv(x, x + n), Xp(n), Xm(n), Yp(n), Ym(n), Xx(n), Yx(n);
    X(x, Xx.data());
    Y(x, Yx.data());
    for (int k = 0; k < n; ++k) out[k] = 0.0;
    for (int mcoord = 0; mcoord < n; ++mcoord) {
      xv[mcoord] = x[mcoord] + h;
      X(xv.data(), Xp.data());
      Y(xv.data(), Yp.data());
      xv[mcoord] = x[mcoord] - h;
      X(xv.data(), Xm.data());
      Y(xv.data(), Ym.data());
      xv[mcoord] = x[mcoord];
      for (int k = 0; k < n; ++k)
        out[k] += Xx[mcoord] * (Yp[k] - Ym[k]) / (2.0 * h) -
                  Yx[mcoord] * (Xp[k] - Xm[k]) / (2.0 * h);
    }
  };
}

}  // namespace

int hormander_rank(const GroupSpec& spec, const Point& x, int max_step, double tol) {
  if (max_step < 1 || max_step > 3)
    throw std::invalid_argument("hormander_rank: max_step must be in {1,2,3}");
  const int n = spec.n, q = spec.q;
  const double h = 1e-5;

  std::vector<FieldEval> layer, all;
  for (int i = 0; i < q; ++i) {
    layer.push_back([&spec, i, n](const double* p, double* out) {
      std::vector<double> c(static_cast<std::size_t>(spec.q) * n);
      spec.field_coeffs(p, c.data());
      for (int k = 0; k < n; ++k) out[k] = c[static_cast<std::size_t>(i) * n + k];
    });
  }
  all = layer;
  std::vector<FieldEval> generators = layer;
  for (int s = 2; s <= max_step; ++s) {
    std::vector<FieldEval> next;
    for (const auto& Y : layer)
      for (const auto& X : generators) next.push_back(bracket(X, Y, n, h));
    all.insert(all.end(), next.begin(), next.end());
    layer = std::move(next);
  }

  Eigen::MatrixXd mat(n, static_cast<int>(all.size()));
  std::vector<double> v(n);
  for (std::size_t c = 0; c < all.size(); ++c) {
    all[c](x.data(), v.data());
    for (int k = 0; k < n; ++k) mat(k, static_cast<int>(c)) = v[k];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return rank;
}

}  // namespace carnot
