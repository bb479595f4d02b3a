#include "carnot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "carnot/rng.hpp"

namespace carnot {

double quasi_distance(const GroupSpec& spec, const Point& x, const Point& y) {
  return hom_norm(spec, compose(spec, invert(spec, y), x));
}

double parabolic_quasi_distance(const GroupSpec& spec, const SpaceTimePoint& z1,
                                const SpaceTimePoint& z2) {
  const double d = quasi_distance(spec, z1.x, z2.x);
  return std::sqrt(d * d + std::abs(z1.t - z2.t));
}

namespace {

// Piecewise-constant-control path evaluator with cached per-segment states so
// a change in segment k only re-integrates segments k..m-1.
class ControlPath {
 public:
  ControlPath(const GroupSpec& spec, int segments)
      : spec_(spec), m_(segments), q_(spec.q),
        controls_(static_cast<std::size_t>(segments) * spec.q, 0.0),
        states_(segments + 1, Point(spec.n, 0.0)) {}

  double* segment(int k) { return controls_.data() + static_cast<std::size_t>(k) * q_; }
  const double* segment(int k) const {
    return controls_.data() + static_cast<std::size_t>(k) * q_;
  }
  int segments() const { return m_; }

  void integrate_from(int k) {
    const double dt = 1.0 / m_;
    for (int s = k; s < m_; ++s)
      states_[s + 1] = flow_direction(spec_, segment(s), dt, states_[s]);
  }

  const Point& endpoint() const { return states_[m_]; }

  double length() const {
    double len = 0.0;
    for (int k = 0; k < m_; ++k) {
      double s2 = 0.0;
      for (int i = 0; i < q_; ++i) s2 += segment(k)[i] * segment(k)[i];
      len += std::sqrt(s2);
    }
    return len / m_;
  }

 private:
  const GroupSpec& spec_;
  int m_, q_;
  std::vector<double> controls_;
  std::vector<Point> states_;
};

double miss2(const Point& end, const Point& target) {
  double s = 0.0;
  for (std::size_t j = 0; j < end.size(); ++j) {
    const double d = end[j] - target[j];
    s += d * d;
  }
  return s;
}

// Penalized coordinate descent for d(0, target) with ||target||_G = 1.
// Returns min over iterates of length + 4 |endpoint - target|^{1/l}: the
// second term covers the residual leg from the endpoint to the target via
// the local Euclidean comparison, so the value is an upper bound even when
// the endpoint match is inexact.
double optimize_unit(const GroupSpec& spec, const Point& target, int budget, int restart) {
  constexpr int kSegments = 16;
  const int q = spec.q;
  ControlPath path(spec, kSegments);

  if (restart == 0) {
    for (int k = 0; k < kSegments; ++k)
      for (int i = 0; i < q; ++i) path.segment(k)[i] = target[i];
  } else if (restart == 1 && q >= 2) {
    for (int k = 0; k < kSegments; ++k) {
      const double th = 2.0 * M_PI * (k + 0.5) / kSegments;
      path.segment(k)[0] = 2.0 * std::cos(th);
      path.segment(k)[1] = 2.0 * std::sin(th);
    }
  } else {
    CounterRng rng(7, static_cast<std::uint64_t>(restart));
    std::uint64_t ctr = 0;
    for (int k = 0; k < kSegments; ++k)
      for (int i = 0; i < q; ++i) path.segment(k)[i] = rng.uniform(ctr++, -1.5, 1.5);
  }
  path.integrate_from(0);

  const double inv_step = 1.0 / spec.step();
  double best = 1e300;
  auto record = [&](double len, double m2) {
    best = std::min(best, len + 4.0 * std::pow(std::sqrt(m2), inv_step));
  };

  // Rounds extend the iterate sequence, so a larger budget replays a smaller
  // one exactly and then keeps going: the recorded best is non-increasing in
  // budget by construction.
  const double mus[] = {1e2, 1e3, 1e4, 1e5, 1e6};
  for (int round = 0; round < budget; ++round) {
    const double step = 0.5 * std::pow(0.5, round);
    for (double mu : mus) {
      for (int k = 0; k < kSegments; ++k) {
        for (int i = 0; i < q; ++i) {
          double cur = path.length() + mu * miss2(path.endpoint(), target);
          for (int dir : {+1, -1}) {
            for (;;) {
              const double old = path.segment(k)[i];
              path.segment(k)[i] = old + dir * step;
              path.integrate_from(k);
              const double trial = path.length() + mu * miss2(path.endpoint(), target);
              if (trial < cur) {
                cur = trial;
              } else {
                path.segment(k)[i] = old;
                path.integrate_from(k);
                break;
              }
            }
          }
        }
      }
      record(path.length(), miss2(path.endpoint(), target));
    }
  }
  return best;
}

}  // namespace

double cc_distance_upper(const GroupSpec& spec, const Point& x, const Point& y, int budget) {
  if (budget < 1) throw std::invalid_argument("cc_distance_upper: budget must be >= 1");
  // reduce by left invariance, then by homogeneity to the unit sphere
  const Point w = compose(spec, invert(spec, x), y);
  const double lambda = hom_norm(spec, w);
  if (lambda == 0.0) return 0.0;
  const Point wbar = dilate(spec, 1.0 / lambda, w);

  double best = 1e300;
  for (int restart = 0; restart < 3; ++restart)
    best = std::min(best, optimize_unit(spec, wbar, budget, restart));
  return lambda * best;
}

double parabolic_distance(const GroupSpec& spec, const SpaceTimePoint& z1,
                          const SpaceTimePoint& z2, DistanceMode mode, int budget) {
  const double d = (mode == DistanceMode::quasi) ? quasi_distance(spec, z1.x, z2.x)
                                                 : cc_distance_upper(spec, z1.x, z2.x, budget);
  return std::sqrt(d * d + std::abs(z1.t - z2.t));
}

namespace {

Point sample_unit_ball(const GroupSpec& spec, const CounterRng& rng, std::uint64_t& ctr) {
  Point p(spec.n);
  for (;;) {
    for (int j = 0; j < spec.n; ++j) p[j] = rng.uniform(ctr++, -1.0, 1.0);
    if (hom_norm(spec, p) < 1.0) return p;
  }
}

}  // namespace

std::pair<double, double> distance_equivalence_scan(const GroupSpec& spec, int pairs,
                                                    int budget, std::uint64_t seed) {
  if (pairs < 10) throw std::invalid_argument("distance_equivalence_scan: need >= 10 pairs");
  CounterRng rng(seed, fnv1a("equiv-scan", 10));
  std::uint64_t ctr = 0;
  double rmin = 1e300, rmax = -1e300;
  int valid = 0;
  for (int s = 0; s < pairs; ++s) {
    const Point x = sample_unit_ball(spec, rng, ctr);
    const Point y = sample_unit_ball(spec, rng, ctr);
    const double dq = quasi_distance(spec, x, y);
    if (dq < 1e-6) continue;
    const double dcc = cc_distance_upper(spec, x, y, budget);
    const double ratio = dcc / dq;
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
    ++valid;
  }
  if (valid < 10)
    throw std::runtime_error("distance_equivalence_scan: fewer than 10 non-degenerate pairs");
  return {rmin, rmax};
}

double ball_volume_mc(const GroupSpec& spec, double r, std::int64_t samples,
                      std::uint64_t seed) {
  if (!(r > 0.0)) throw std::invalid_argument("ball_volume_mc: radius must be positive");
  if (samples < 10000) throw std::invalid_argument("ball_volume_mc: need >= 10^4 samples");
  CounterRng rng(seed, fnv1a("volume-mc", 9));

  // |x_j| <= r^{sigma_j} is exact: every coordinate of a norm-r point obeys it
  std::vector<double> half(spec.n);
  double box_vol = 1.0;
  for (int j = 0; j < spec.n; ++j) {
    half[j] = std::pow(r, spec.sigma[j]);
    box_vol *= 2.0 * half[j];
  }

  std::int64_t hits = 0;
  Point p(spec.n);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int j = 0; j < spec.n; ++j)
      p[j] = rng.uniform(static_cast<std::uint64_t>(s) * spec.n + j, -half[j], half[j]);
    if (hom_norm(spec, p) < r) ++hits;
  }
  return box_vol * static_cast<double>(hits) / static_cast<double>(samples);
}

double volume_growth_exponent(const GroupSpec& spec, const std::vector<double>& radii,
                              std::int64_t samples, std::uint64_t seed) {
  if (radii.size() < 2)
    throw std::invalid_argument("volume_growth_exponent: need >= 2 radii");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = std::log(radii[i]);
    const double y = std::log(ball_volume_mc(spec, radii[i], samples, seed + i));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool cylinder_contains(const Cylinder& c, const SpaceTimePoint& z, const GroupSpec& spec) {
  if (quasi_distance(spec, z.x, c.center.x) >= c.radius) return false;
  const double dt = z.t - c.center.t;
  const double r2 = c.radius * c.radius;
  switch (c.kind) {
    case CylinderKind::full:   return dt > -r2 && dt < r2;
    case CylinderKind::past:   return dt > -r2 && dt <= 0.0;
    case CylinderKind::future: return dt > 0.0 && dt <= r2;
  }
  return false;
}

double quasi_triangle_constant(const GroupSpec& spec, int samples, std::uint64_t seed) {
  CounterRng rng(seed, fnv1a("quasi-triangle", 13));
  std::uint64_t ctr = 0;
  double worst = 0.0;
  Point x(spec.n), y(spec.n), zp(spec.n);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < spec.n; ++j) {
      x[j] = rng.uniform(ctr++, -1.0, 1.0);
      y[j] = rng.uniform(ctr++, -1.0, 1.0);
      zp[j] = rng.uniform(ctr++, -1.0, 1.0);
    }
    const double denom = quasi_distance(spec, x, y) + quasi_distance(spec, y, zp);
    if (denom < 1e-9) continue;
    worst = std::max(worst, quasi_distance(spec, x, zp) / denom);
  }
  return worst;
}

EuclideanComparison euclidean_comparison_scan(const GroupSpec& spec, int pairs,
                                              std::uint64_t seed) {
  CounterRng rng(seed, fnv1a("eucl-compare", 12));
  std::uint64_t ctr = 0;
  const double s = static_cast<double>(spec.step());
  EuclideanComparison out{1e300, 0.0};
  Point x(spec.n), y(spec.n);
  for (int k = 0; k < pairs; ++k) {
    double e2 = 0.0;
    for (int j = 0; j < spec.n; ++j) {
      x[j] = rng.uniform(ctr++, -1.0, 1.0);
      y[j] = rng.uniform(ctr++, -1.0, 1.0);
      const double d = x[j] - y[j];
      e2 += d * d;
    }
    const double eucl = std::sqrt(e2);
    if (eucl < 1e-9) continue;
    const double dq = quasi_distance(spec, x, y);
    out.c_minus = std::min(out.c_minus, dq / eucl);
    out.c_plus = std::max(out.c_plus, dq / std::pow(eucl, 1.0 / s));
  }
  return out;
}

}  // namespace carnot
