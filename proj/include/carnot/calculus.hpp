#pragma once

#include <cstdint>
#include <utility>

#include "carnot/fields.hpp"
#include "carnot/metrics.hpp"

namespace carnot {

// Derivatives along the generator flows rather than coordinate stencils: this
// keeps X_i exact on curved fields and makes the degree-one scaling identity
// hold to integrator accuracy.

// X_i u(z) by central difference along exp(+-h X_i); O(h^2).
double xdiff(const GroupSpec& spec, const ScalarField& u, int i, const SpaceTimePoint& z,
             double h);

// X_i X_j u(z) by nested flow stencils; O(h^2).
double xxdiff(const GroupSpec& spec, const ScalarField& u, int i, int j,
              const SpaceTimePoint& z, double h);

// d/dt by central difference.
double tdiff(const ScalarField& u, const SpaceTimePoint& z, double h);

// H u(z) = sum a_ij X_i X_j u + sum b_i X_i u - du/dt.
double apply_H(const ProblemSpec& p, const ScalarField& u, const SpaceTimePoint& z, double h);

// Intrinsic Taylor polynomial of delta-degree m at `base`:
//   P_0 u = u(base),   P_1 u = u(base) + sum_{i<q} X_i u(base) (x_i - base_i).
// Only m in {0,1} is supported; first-layer coordinates compose additively so
// no exponential coordinates are needed.
ScalarField taylor_p(int m, const ScalarField& u, const SpaceTimePoint& base,
                     const GroupSpec& spec, double fd_h = 1e-5);

struct SpaceTimeBox {
  Box space;
  double t0 = 0.0, t1 = 1.0;
};

struct HolderEstimate {
  double total = 0.0;      // the estimated C_X^{m,alpha} norm
  double sup_u = 0.0;
  double quotient0 = 0.0;  // sup |u(z)-u(w)| / d_p^alpha
  double quotient1 = 0.0;  // sup |u(z)-u(w)-sum (z_i-w_i) X_i u(w)| / d_p^{1+alpha}
  double sup_x = 0.0;      // sum_i sup |X_i u|
  double sup_xx = 0.0;     // sum_ij sup |X_i X_j u|  (m = 2 only)
  double sup_t = 0.0;      // sup |du/dt|            (m = 2 only)
  long pairs = 0;
};

// Sampled estimate of the C_X^{m,alpha} norm over `region` using the
// parabolic quasi-distance.  Pairs come from a low-discrepancy sequence plus
// near-diagonal offsets; the estimate is monotone non-decreasing in
// sample_pairs.  m in {0,1,2}; m = 2 adds the second-derivative and
// time-derivative sup norms as in the full norm.
HolderEstimate holder_norm_estimate(const ScalarField& u, int m, double alpha,
                                    const SpaceTimeBox& region, const GroupSpec& spec,
                                    long sample_pairs, double fd_h = 1e-4);

// sup|u| + sum sup|X_i u| + sum sup|X_i X_j u| + sup|du/dt| over interior
// nodes of the region with margin 2h, sampled on a lattice.
double sobolev_sup_estimate(const ScalarField& u, const ProblemSpec& p,
                            const SpaceTimeBox& region, double h, int lattice = 9);

// sup over sampled z of |u(z) - P_m u(z)| / d_p(z, base)^{m+alpha}.
std::pair<double, SpaceTimePoint> taylor_remainder_check(const ScalarField& u, int m,
                                                         double alpha,
                                                         const SpaceTimePoint& base,
                                                         const SpaceTimeBox& region,
                                                         const GroupSpec& spec,
                                                         long samples = 2000,
                                                         double fd_h = 1e-5);

// Dimension of span{X_i(x)} together with iterated brackets up to order
// max_step (<= 3), via finite-difference brackets and an SVD rank with the
// given conditioning tolerance.
int hormander_rank(const GroupSpec& spec, const Point& x, int max_step = 2,
                   double tol = 1e-8);

}  // namespace carnot
