#pragma once

#include <cstdint>
#include <utility>

#include "carnot/group.hpp"

namespace carnot {

enum class CylinderKind { full, past, future };

// C_r(x,t), C_r^-(x,t), C_r^+(x,t): quasi-ball times a time interval.  The
// interval is (t - r^2, t + r^2) for `full`, (t - r^2, t] for `past` and
// (t, t + r^2] for `future`.
struct Cylinder {
  SpaceTimePoint center;
  double radius = 1.0;
  CylinderKind kind = CylinderKind::full;
};

// d_hat(x, y) = ||y^-1 o x||_G
double quasi_distance(const GroupSpec& spec, const Point& x, const Point& y);

// sqrt(d_hat(x,y)^2 + |t - s|)
double parabolic_quasi_distance(const GroupSpec& spec, const SpaceTimePoint& z1,
                                const SpaceTimePoint& z2);

enum class DistanceMode { cc, quasi };

// Parabolic distance with the spatial part taken either from the closed-form
// quasi-distance or from the CC upper bound (budget applies to cc mode only).
double parabolic_distance(const GroupSpec& spec, const SpaceTimePoint& z1,
                          const SpaceTimePoint& z2, DistanceMode mode, int budget = 8);

// Upper bound on the Carnot-Caratheodory distance: length of the best found
// X-subunit path from x to y.  The pair is reduced by left invariance to
// d(0, x^-1 o y) and by homogeneity to a target of unit homogeneous norm;
// the unit-scale problem is solved with piecewise-constant controls over 16
// segments, penalized endpoint mismatch and coordinate descent from 3
// deterministic restarts.  `budget` is the number of descent sweeps per
// penalty stage; the result is non-increasing in budget.
double cc_distance_upper(const GroupSpec& spec, const Point& x, const Point& y, int budget);

// min / max of cc_distance_upper / quasi_distance over random pairs in the
// unit quasi-ball.
std::pair<double, double> distance_equivalence_scan(const GroupSpec& spec, int pairs,
                                                    int budget = 6, std::uint64_t seed = 1);

// Monte-Carlo Lebesgue volume of the quasi-ball B(0, r) by rejection sampling
// in the exact bounding box |x_j| <= r^{sigma_j}; deterministic given seed.
double ball_volume_mc(const GroupSpec& spec, double r, std::int64_t samples,
                      std::uint64_t seed);

// Least-squares slope of log vol against log r; equals the homogeneous
// dimension Q up to Monte-Carlo noise.
double volume_growth_exponent(const GroupSpec& spec, const std::vector<double>& radii,
                              std::int64_t samples, std::uint64_t seed);

bool cylinder_contains(const Cylinder& c, const SpaceTimePoint& z, const GroupSpec& spec);

// Measured constant K in d(x,z) <= K (d(x,y) + d(y,z)) over sampled triples.
double quasi_triangle_constant(const GroupSpec& spec, int samples, std::uint64_t seed);

// Measured constants in c_minus |x-y| <= d_hat(x,y) <= c_plus |x-y|^{1/s}
// over pairs in the unit box.
struct EuclideanComparison {
  double c_minus = 0.0;
  double c_plus = 0.0;
};
EuclideanComparison euclidean_comparison_scan(const GroupSpec& spec, int pairs,
                                              std::uint64_t seed);

}  // namespace carnot
