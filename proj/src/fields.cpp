#include "carnot/fields.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "carnot/rng.hpp"

namespace carnot {

MatrixCoefficients identity_coefficients(int q) {
  return [q](const Point&, double, double* a) {
    std::memset(a, 0, sizeof(double) * q * q);
    for (int i = 0; i < q; ++i) a[i * q + i] = 1.0;
  };
}

MatrixCoefficients diagonal_coefficients(std::vector<double> diag) {
  const int q = static_cast<int>(diag.size());
  return [q, diag = std::move(diag)](const Point&, double, double* a) {
    std::memset(a, 0, sizeof(double) * q * q);
    for (int i = 0; i < q; ++i) a[i * q + i] = diag[i];
  };
}

VectorCoefficients zero_drift(int q) {
  return [q](const Point&, double, double* b) { std::memset(b, 0, sizeof(double) * q); };
}

VectorCoefficients constant_drift(std::vector<double> bvals) {
  const int q = static_cast<int>(bvals.size());
  return [q, bvals = std::move(bvals)](const Point&, double, double* b) {
    std::memcpy(b, bvals.data(), sizeof(double) * q);
  };
}

ProblemValidation validate_problem(const ProblemSpec& p, int samples, std::uint64_t seed) {
  const int n = p.group.n, q = p.group.q;
  if (p.box.dim() != n) throw std::invalid_argument("validate_problem: box dimension mismatch");
  CounterRng rng(seed, fnv1a("problem-validate", 16));

  ProblemValidation v;
  v.worst_ellipticity_low = 1e300;
  v.worst_ellipticity_high = -1e300;
  v.worst_gap = 1e300;

  std::vector<double> a(static_cast<std::size_t>(q) * q), xi(q);
  Point x(n);
  std::uint64_t ctr = 0;
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) x[j] = rng.uniform(ctr++, p.box.lo[j], p.box.hi[j]);
    const double t = rng.uniform(ctr++, p.t0, p.t1);
    p.a(x, t, a.data());

    for (int i = 0; i < q; ++i)
      for (int j = i + 1; j < q; ++j)
        v.worst_symmetry = std::max(v.worst_symmetry, std::abs(a[i * q + j] - a[j * q + i]));

    double nrm2 = 0.0;
    for (int i = 0; i < q; ++i) {
      xi[i] = rng.uniform(ctr++, -1.0, 1.0);
      nrm2 += xi[i] * xi[i];
    }
    if (nrm2 > 1e-12) {
      double quad = 0.0;
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) quad += a[i * q + j] * xi[i] * xi[j];
      v.worst_ellipticity_low = std::min(v.worst_ellipticity_low, quad * p.ellipticity / nrm2);
      v.worst_ellipticity_high = std::max(v.worst_ellipticity_high, quad / (p.ellipticity * nrm2));
    }

    // parabolic boundary sample: initial slice or a lateral side
    Point xb = x;
    double tb = t;
    if (s % 2 == 0) {
      tb = p.t0;
    } else {
      const int ax = s % n;
      xb[ax] = (s % 4 < 2) ? p.box.lo[ax] : p.box.hi[ax];
    }
    if (p.has_obstacle) v.worst_gap = std::min(v.worst_gap, p.g(xb, tb) - p.phi(xb, tb));
  }

  v.symmetric = v.worst_symmetry < 1e-10;
  v.elliptic = v.worst_ellipticity_low >= 1.0 - 1e-9 && v.worst_ellipticity_high <= 1.0 + 1e-9;
  v.boundary_ordered = !p.has_obstacle || v.worst_gap >= -1e-12;
  return v;
}

}  // namespace carnot
