#include "carnot/group.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include <Eigen/Dense>

namespace carnot {

namespace {

void check_dim(const GroupSpec& spec, const Point& p, const char* what) {
  if (static_cast<int>(p.size()) != spec.n)
    throw std::invalid_argument(std::string(what) + ": point dimension " +
                                std::to_string(p.size()) + " != group dimension " +
                                std::to_string(spec.n));
}

void check_finite(const Point& p, const char* what) {
  for (double v : p)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

int factorial(int k) {
  int f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

GroupSpec euclidean_group(int n) {
  if (n < 1) throw std::invalid_argument("euclidean_group: n must be >= 1");
  GroupSpec spec;
  spec.name = "euclidean(" + std::to_string(n) + ")";
  spec.n = n;
  spec.q = n;
  spec.layer_dims = {n};
  spec.sigma.assign(n, 1);
  spec.compose_law = [n](const double* x, const double* y, double* out) {
    for (int i = 0; i < n; ++i) out[i] = x[i] + y[i];
  };
  spec.field_coeffs = [n](const double*, double* c) {
    std::memset(c, 0, sizeof(double) * n * n);
    for (int i = 0; i < n; ++i) c[i * n + i] = 1.0;
  };
  return spec;
}

GroupSpec heisenberg_group() {
  GroupSpec spec;
  spec.name = "heisenberg";
  spec.n = 3;
  spec.q = 2;
  spec.layer_dims = {2, 1};
  spec.sigma = {1, 1, 2};
  spec.compose_law = [](const double* x, const double* y, double* out) {
    out[0] = x[0] + y[0];
    out[1] = x[1] + y[1];
    out[2] = x[2] + y[2] + 0.5 * (x[0] * y[1] - x[1] * y[0]);
  };
  // X_1 = d/dx - (y/2) d/dz,  X_2 = d/dy + (x/2) d/dz
  spec.field_coeffs = [](const double* x, double* c) {
    c[0] = 1.0; c[1] = 0.0; c[2] = -0.5 * x[1];
    c[3] = 0.0; c[4] = 1.0; c[5] = 0.5 * x[0];
  };
  return spec;
}

Point compose(const GroupSpec& spec, const Point& p, const Point& r) {
  check_dim(spec, p, "compose");
  check_dim(spec, r, "compose");
  Point out(spec.n);
  spec.compose_law(p.data(), r.data(), out.data());
  return out;
}

Point invert(const GroupSpec& spec, const Point& p) {
  check_dim(spec, p, "invert");
  const int n = spec.n;
  Point r(n), res(n);
  for (int i = 0; i < n; ++i) r[i] = -p[i];

  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(p[i]));
  const double tol = 1e-15 * scale;

  Point rp(n), rm(n), fp(n), fm(n);
  for (int iter = 0; iter < 30; ++iter) {
    spec.compose_law(p.data(), r.data(), res.data());
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(res[i]));
    if (err <= tol) return r;

    Eigen::MatrixXd jac(n, n);
    const double h = 1e-6 * scale;
    for (int k = 0; k < n; ++k) {
      rp = r; rm = r;
      rp[k] += h; rm[k] -= h;
      spec.compose_law(p.data(), rp.data(), fp.data());
      spec.compose_law(p.data(), rm.data(), fm.data());
      for (int i = 0; i < n; ++i) jac(i, k) = (fp[i] - fm[i]) / (2.0 * h);
    }
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = -res[i];
    Eigen::VectorXd delta = jac.partialPivLu().solve(rhs);
    for (int i = 0; i < n; ++i) r[i] += delta(i);
  }
  throw std::runtime_error("invert: Newton iteration did not converge for group " + spec.name);
}

Point dilate(const GroupSpec& spec, double lambda, const Point& p) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
  check_dim(spec, p, "dilate");
  Point out(spec.n);
  for (int j = 0; j < spec.n; ++j) out[j] = std::pow(lambda, spec.sigma[j]) * p[j];
  return out;
}

SpaceTimePoint dilate_st(const GroupSpec& spec, double lambda, const SpaceTimePoint& z) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilate_st: lambda must be positive");
  return {dilate(spec, lambda, z.x), lambda * lambda * z.t};
}

SpaceTimePoint compose_st(const GroupSpec& spec, const SpaceTimePoint& z1,
                          const SpaceTimePoint& z2) {
  return {compose(spec, z1.x, z2.x), z1.t + z2.t};
}

SpaceTimePoint invert_st(const GroupSpec& spec, const SpaceTimePoint& z) {
  return {invert(spec, z.x), -z.t};
}

double hom_norm(const GroupSpec& spec, const Point& p) {
  check_dim(spec, p, "hom_norm");
  const int l = spec.step();
  const int twolf = 2 * factorial(l);
  double sum = 0.0;
  for (int j = 0; j < spec.n; ++j) {
    const int e = twolf / spec.sigma[j];
    sum += std::pow(std::abs(p[j]), e);
  }
  return std::pow(sum, 1.0 / twolf);
}

double hom_norm_st(const GroupSpec& spec, const SpaceTimePoint& z) {
  const int l = spec.step();
  const int lf = factorial(l);
  const double s = std::pow(hom_norm(spec, z.x), 2 * lf) + std::pow(std::abs(z.t), lf);
  return std::pow(s, 1.0 / (2 * lf));
}

int homogeneous_dimension(const GroupSpec& spec) {
  int qd = 0;
  for (std::size_t i = 0; i < spec.layer_dims.size(); ++i)
    qd += static_cast<int>(i + 1) * spec.layer_dims[i];
  return qd;
}

Point flow_direction(const GroupSpec& spec, const double* dir, double h, const Point& x) {
  check_dim(spec, x, "flow");
  check_finite(x, "flow");
  if (!std::isfinite(h)) throw std::invalid_argument("flow: non-finite step");
  const int n = spec.n, q = spec.q;

  Point y = x;
  if (h == 0.0) return y;
  const int substeps = static_cast<int>(std::ceil(std::abs(h) / 0.05));
  const double dt = h / substeps;

  std::vector<double> coeffs(static_cast<std::size_t>(q) * n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto rhs = [&](const Point& pos, std::vector<double>& k) {
    spec.field_coeffs(pos.data(), coeffs.data());
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int i = 0; i < q; ++i) v += dir[i] * coeffs[static_cast<std::size_t>(i) * n + j];
      k[j] = v;
    }
  };

  Point stage(n);
  for (int s = 0; s < substeps; ++s) {
    rhs(y, k1);
    for (int j = 0; j < n; ++j) stage[j] = y[j] + 0.5 * dt * k1[j];
    rhs(stage, k2);
    for (int j = 0; j < n; ++j) stage[j] = y[j] + 0.5 * dt * k2[j];
    rhs(stage, k3);
    for (int j = 0; j < n; ++j) stage[j] = y[j] + dt * k3[j];
    rhs(stage, k4);
    for (int j = 0; j < n; ++j)
      y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  for (double v : y)
    if (!std::isfinite(v)) throw std::runtime_error("flow: integration produced non-finite state");
  return y;
}

Point flow(const GroupSpec& spec, int field_index, double h, const Point& x) {
  if (field_index < 0 || field_index >= spec.q)
    throw std::invalid_argument("flow: field index out of range");
  std::vector<double> dir(spec.q, 0.0);
  dir[field_index] = 1.0;
  return flow_direction(spec, dir.data(), h, x);
}

}  // namespace carnot
